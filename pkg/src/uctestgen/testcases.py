"""Step 3: one abstract test case per test path."""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .gateway import GenerationRequest, Provider
from .generation import PROMPT_VERSION, load_template, strip_code_fence
from .model import CONDITION_PREFIX, CodecError, MalformedDocument, TestCase, TestPath, TestStep, UseCase, test_case_from_dict

log = logging.getLogger(__name__)

TITLE_WIDTH = 80
DEFAULT_EXPECTED = "Step completes as described"


class Renderer(str, enum.Enum):
    LLM = "llm"
    TEMPLATE = "template"


class RenderExhausted(RuntimeError):
    def __init__(self, attempts: int, last_failure: str, path_index: Optional[int] = None):
        where = "" if path_index is None else f" for path {path_index}"
        super().__init__(f"no well-formed test case{where} after {attempts} attempts: {last_failure}")
        self.attempts = attempts
        self.last_failure = last_failure
        self.path_index = path_index


class SuiteError(RuntimeError):
    def __init__(self, path_index: int, cause: Exception):
        super().__init__(f"path {path_index}: {cause}")
        self.path_index = path_index
        self.cause = cause


@dataclass(frozen=True)
class RenderConfig:
    renderer: Renderer = Renderer.LLM
    max_regeneration_attempts: int = 3
    prompt_template_version: str = PROMPT_VERSION

    def __post_init__(self) -> None:
        object.__setattr__(self, "renderer", Renderer(self.renderer))
        if self.max_regeneration_attempts < 1:
            raise ValueError("max_regeneration_attempts must be >= 1")


def assemble_testcase_prompt(use_case: UseCase, path: TestPath, version: str = PROMPT_VERSION) -> str:
    if not path.steps:
        raise ValueError("cannot build a prompt for an empty path")
    block = "\n".join(f"{i}. {step}" for i, step in enumerate(path.steps, 1))
    return load_template("testcase", version).substitute(use_case=use_case.text, path=block)


def render_template_case(use_case: UseCase, path: TestPath, case_id: str = "TC-001", index: int = 0) -> TestCase:
    """Deterministic test case built straight from the path steps.

    Every statement becomes an action. A condition step is folded into the
    expected result of the action that follows it.
    """
    if not path.steps:
        raise ValueError("cannot render an empty path")
    steps, pending = [], None
    for step in path.steps:
        if TestPath.is_condition(step):
            cond = step[len(CONDITION_PREFIX):]
            pending = cond if pending is None else f"{pending} and {cond}"
            continue
        expected = DEFAULT_EXPECTED
        if pending is not None:
            expected = f"Given {pending}, {DEFAULT_EXPECTED[0].lower()}{DEFAULT_EXPECTED[1:]}"
            pending = None
        steps.append(TestStep(step, expected))
    terminal = steps[-1].action
    title = "Verify: " + (terminal if len(terminal) <= TITLE_WIDTH else terminal[: TITLE_WIDTH - 3] + "...")
    return TestCase(
        id=case_id,
        title=title,
        preconditions=(f"Use case {use_case.label} is available",),
        steps=tuple(steps),
        source_path_index=index,
    )


def parse_llm_test_case(text: str, case_id: str, index: int) -> TestCase:
    try:
        raw = json.loads(strip_code_fence(text))
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not JSON: {exc}") from exc
    if isinstance(raw, dict) and isinstance(raw.get("test_cases"), list) and len(raw["test_cases"]) == 1:
        raw = raw["test_cases"][0]
    tc = test_case_from_dict(raw, default_id=case_id, default_index=index)
    return replace(tc, id=case_id, source_path_index=index)


def create_test_case(
    use_case: UseCase,
    path: TestPath,
    provider: Optional[Provider],
    config: RenderConfig = RenderConfig(),
    case_id: str = "TC-001",
    index: int = 0,
) -> tuple[TestCase, int]:
    """Render one path into a test case; returns the case and attempts used."""
    if not path.steps:
        raise ValueError("cannot render an empty path")
    if config.renderer is Renderer.TEMPLATE:
        return render_template_case(use_case, path, case_id, index), 1
    if provider is None:
        raise ValueError("the llm renderer needs a provider")
    request = GenerationRequest(user_prompt=assemble_testcase_prompt(use_case, path, config.prompt_template_version))
    last = ""
    for attempt in range(1, config.max_regeneration_attempts + 1):
        raw = provider.complete(request)
        try:
            return parse_llm_test_case(raw, case_id, index), attempt
        except (CodecError, ValueError) as exc:
            last = str(exc)
            log.info("%s path %d attempt %d: malformed test case (%s)", use_case.id, index, attempt, exc)
    raise RenderExhausted(config.max_regeneration_attempts, last, index)


def render_test_suite(
    use_case: UseCase,
    paths: Sequence[TestPath],
    provider: Optional[Provider],
    config: RenderConfig = RenderConfig(),
) -> tuple[list[TestCase], list[int]]:
    """One test case per path, ids ``TC-001``... in path order.

    Returns the suite and the attempt count for each path.
    """
    suite, attempts = [], []
    for index, path in enumerate(paths):
        try:
            tc, used = create_test_case(use_case, path, provider, config, f"TC-{index + 1:03d}", index)
        except Exception as exc:
            raise SuiteError(index, exc) from exc
        suite.append(tc)
        attempts.append(used)
    return suite, attempts


def suite_to_markdown(use_case: UseCase, suite: Sequence[TestCase]) -> str:
    lines = [f"# Test cases for {use_case.label}", ""]
    for tc in suite:
        lines += [f"## {tc.id}", "", f"**Title:** {tc.title}", "", "**Preconditions:**", ""]
        lines += [f"- {p}" for p in tc.preconditions] or ["- None"]
        lines += ["", "**Steps:**", "", "| # | Action | Expected Result |", "|---|---|---|"]
        for i, s in enumerate(tc.steps, 1):
            lines.append(f"| {i} | {_cell(s.action)} | {_cell(s.expected_result)} |")
        lines.append("")
    return "\n".join(lines)


def _cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")
