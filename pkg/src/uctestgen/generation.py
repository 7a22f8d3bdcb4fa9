"""Step 1: use case -> validated CFG (LLM with regeneration, or the rule-based builder)."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from string import Template
from typing import Optional

from .gateway import GenerationRequest, Provider
from .model import CONDITION_PREFIX, Cfg, CodecError, Edge, Node, UseCase, parse_cfg_document
from .validation import ValidationVerdict, validate_cfg

log = logging.getLogger(__name__)

PROMPT_VERSION = "v1"
SCHEMA_CLAUSE = 'Return only valid JSON with exactly two top-level fields, "nodes" and "edges"'

_FENCE = re.compile(r"^\s*```[A-Za-z0-9_-]*\s*\n(.*?)\n\s*```\s*$", re.DOTALL)
_ENUMERATION = re.compile(r"^\s*(?:\d+[.)]|[-*])\s+")


class DanglingCondition(ValueError):
    pass


class GenerationExhausted(RuntimeError):
    def __init__(self, attempts: int, last_failure: str, verdict: Optional[ValidationVerdict] = None):
        super().__init__(f"no valid CFG after {attempts} attempts; last failure: {last_failure}")
        self.attempts = attempts
        self.last_failure = last_failure
        self.verdict = verdict


@dataclass(frozen=True)
class FlowStep:
    statement: str
    is_condition: bool = False


@dataclass(frozen=True)
class FlowSteps:
    steps: tuple[FlowStep, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("a flow needs at least one step")
        if self.steps[0].is_condition:
            raise ValueError("the first step of a flow cannot be a condition")

    @classmethod
    def of(cls, *items: str | tuple[str, bool]) -> "FlowSteps":
        """Build from plain strings; ``("text", True)`` marks a condition."""
        steps = [FlowStep(i) if isinstance(i, str) else FlowStep(i[0], i[1]) for i in items]
        return cls(tuple(steps))


@dataclass(frozen=True)
class GenerationConfig:
    max_regeneration_attempts: int = 5
    prompt_template_version: str = PROMPT_VERSION

    def __post_init__(self) -> None:
        if self.max_regeneration_attempts < 1:
            raise ValueError("max_regeneration_attempts must be >= 1")


def load_template(name: str, version: str = PROMPT_VERSION) -> Template:
    text = resources.files("uctestgen.prompts").joinpath(f"{name}_{version}.txt").read_text("utf-8")
    return Template(text.rstrip("\n"))


def assemble_cfg_prompt(use_case: UseCase, version: str = PROMPT_VERSION) -> str:
    return load_template("cfg", version).substitute(use_case=use_case.text)


def parse_flow_steps(text: str) -> FlowSteps:
    """Read a pre-segmented flow: one step per line.

    Lines starting with ``condition:`` are condition steps. A leading
    ``Title:`` line, blank lines and list markers (``1.``, ``-``) are ignored.
    """
    steps = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.lower().startswith("title:"):
            continue
        line = _ENUMERATION.sub("", line)
        if line.lower().startswith(CONDITION_PREFIX):
            steps.append(FlowStep(line[len(CONDITION_PREFIX):].strip(), True))
        else:
            steps.append(FlowStep(line))
    return FlowSteps(tuple(steps))


def build_cfg_from_steps(flow: FlowSteps) -> Cfg:
    """Deterministic CFG construction from a merged step sequence.

    Nodes are S1..Sn in order. The first edge S1->S2 has weight 1. For every
    step whose successor is a condition, two edges (into the condition and
    past it) share the next weight; otherwise one edge to the successor gets
    the next weight. Weights are carried for completeness only.
    """
    steps = flow.steps
    n = len(steps)
    if steps[-1].is_condition:
        raise DanglingCondition(f"condition {steps[-1].statement!r} is the last step")
    nodes = tuple(Node(f"S{i + 1}", s.statement) for i, s in enumerate(steps))
    if n == 1:
        return Cfg(nodes, ())

    def sid(i: int) -> str:
        return f"S{i + 1}"

    edges = [Edge(sid(0), sid(1), 1)]
    weight = 1
    for i in range(n - 1):
        targets = [i + 1, i + 2] if steps[i + 1].is_condition else [i + 1]
        if targets[-1] >= n:
            raise DanglingCondition(f"no step after condition {steps[i + 1].statement!r}")
        new = [t for t in targets if (i, t) != (0, 1)]  # S1->S2 already added
        if not new:
            continue
        weight += 1
        edges.extend(Edge(sid(i), sid(t), weight) for t in new)
    return Cfg(nodes, tuple(edges))


def strip_code_fence(text: str) -> str:
    match = _FENCE.match(text)
    return match.group(1) if match else text


def cfg_request(use_case: UseCase, config: GenerationConfig) -> GenerationRequest:
    return GenerationRequest(user_prompt=assemble_cfg_prompt(use_case, config.prompt_template_version))


def generate_cfg(
    use_case: UseCase, provider: Provider, config: GenerationConfig = GenerationConfig()
) -> tuple[Cfg, int]:
    """Ask the provider for a CFG until one parses and validates.

    Returns the CFG and the number of attempts used. Unparseable responses
    count as failed attempts; provider errors propagate.
    """
    request = cfg_request(use_case, config)
    last_failure, last_verdict = "", None
    for attempt in range(1, config.max_regeneration_attempts + 1):
        raw = provider.complete(request)
        try:
            cfg = parse_cfg_document(strip_code_fence(raw))
        except CodecError as exc:
            last_failure, last_verdict = f"{type(exc).__name__}: {exc}", None
            log.info("%s attempt %d: unparseable CFG (%s)", use_case.id, attempt, exc)
            continue
        verdict = validate_cfg(cfg)
        if verdict.valid:
            return cfg, attempt
        last_failure, last_verdict = verdict.summary(), verdict
        log.info("%s attempt %d: invalid CFG (%s)", use_case.id, attempt, last_failure)
    raise GenerationExhausted(config.max_regeneration_attempts, last_failure, last_verdict)


def build_cfg_for_use_case(use_case: UseCase) -> Cfg:
    return build_cfg_from_steps(parse_flow_steps(use_case.text))
