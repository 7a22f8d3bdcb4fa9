"""Core value types (use cases, CFGs, paths, test cases) and their JSON codecs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

CONDITION_PREFIX = "condition: "


class CodecError(ValueError):
    """Base class for document decoding failures."""


class MalformedDocument(CodecError):
    pass


class DuplicateNodeId(CodecError):
    pass


@dataclass(frozen=True)
class UseCase:
    id: str
    text: str
    title: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("use case id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"use case {self.id!r} has empty text")

    @property
    def label(self) -> str:
        return f"{self.id}: {self.title}" if self.title else self.id


@dataclass(frozen=True)
class Node:
    id: str
    statement: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("node id must be non-empty")
        if not self.statement:
            raise ValueError(f"node {self.id!r} has an empty statement")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: int = 1
    condition: Optional[str] = None

    def __post_init__(self) -> None:
        if self.weight < 1:
            raise ValueError(f"edge weight must be >= 1, got {self.weight}")


@dataclass(frozen=True)
class Cfg:
    """Directed control-flow graph. The first node is the root."""

    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        seen: set[str] = set()
        for node in self.nodes:
            if node.id in seen:
                raise DuplicateNodeId(node.id)
            seen.add(node.id)

    @property
    def root(self) -> Optional[Node]:
        return self.nodes[0] if self.nodes else None

    @property
    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def statement(self, node_id: str) -> str:
        for node in self.nodes:
            if node.id == node_id:
                return node.statement
        raise KeyError(node_id)

    def statements(self) -> dict[str, str]:
        return {n.id: n.statement for n in self.nodes}


@dataclass(frozen=True)
class TestPath:
    """Ordered textual steps; condition steps carry the ``condition: `` prefix."""

    __test__ = False

    steps: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    @staticmethod
    def is_condition(step: str) -> bool:
        return step.startswith(CONDITION_PREFIX)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


@dataclass(frozen=True)
class TestStep:
    __test__ = False

    action: str
    expected_result: str


@dataclass(frozen=True)
class TestCase:
    __test__ = False

    id: str
    title: str
    preconditions: tuple[str, ...]
    steps: tuple[TestStep, ...]
    source_path_index: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "preconditions", tuple(self.preconditions))
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            raise ValueError("a test case needs at least one step")
        for step in self.steps:
            if not step.action.strip():
                raise ValueError("test step action must be non-empty")


# --- codecs -----------------------------------------------------------------


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _load_json(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not UTF-8: {exc}") from exc
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not JSON: {exc}") from exc


def cfg_from_dict(doc: Any) -> Cfg:
    if not isinstance(doc, dict):
        raise MalformedDocument("CFG document must be a JSON object")
    raw_nodes, raw_edges = doc.get("nodes"), doc.get("edges")
    if not isinstance(raw_nodes, list) or not isinstance(raw_edges, list):
        raise MalformedDocument('CFG document needs "nodes" and "edges" arrays')

    nodes = []
    for i, raw in enumerate(raw_nodes):
        if not isinstance(raw, dict):
            raise MalformedDocument(f"node {i} is not an object")
        node_id, statement = raw.get("id"), raw.get("statement")
        if node_id is None or node_id == "":
            raise MalformedDocument(f"node {i} has no id")
        if not isinstance(statement, str) or not statement:
            raise MalformedDocument(f"node {i} ({node_id}) has no statement")
        nodes.append(Node(str(node_id), statement))

    edges = []
    for i, raw in enumerate(raw_edges):
        if not isinstance(raw, dict):
            raise MalformedDocument(f"edge {i} is not an object")
        src, dst = raw.get("from"), raw.get("to")
        if src is None or dst is None:
            raise MalformedDocument(f"edge {i} needs both 'from' and 'to'")
        weight = raw.get("weight", 1)
        if weight is None:
            weight = 1
        if isinstance(weight, bool) or not isinstance(weight, (int, float)) or weight != int(weight):
            raise MalformedDocument(f"edge {i} has a non-integer weight {weight!r}")
        condition = raw.get("condition")
        if condition is not None and not isinstance(condition, str):
            raise MalformedDocument(f"edge {i} condition must be a string or null")
        try:
            edges.append(Edge(str(src), str(dst), int(weight), condition))
        except ValueError as exc:
            raise MalformedDocument(f"edge {i}: {exc}") from exc
    return Cfg(tuple(nodes), tuple(edges))


def cfg_to_dict(cfg: Cfg) -> dict:
    return {
        "nodes": [{"id": n.id, "statement": n.statement} for n in cfg.nodes],
        "edges": [
            {"from": e.source, "to": e.target, "weight": e.weight, "condition": e.condition}
            for e in cfg.edges
        ],
    }


def parse_cfg_document(data: bytes | str) -> Cfg:
    """Decode a CFG JSON document. Unknown keys are ignored."""
    return cfg_from_dict(_load_json(data))


def serialize_cfg_document(cfg: Cfg) -> str:
    return _dump(cfg_to_dict(cfg))


def serialize_paths_document(paths: Iterable[TestPath]) -> str:
    return _dump({"paths": [list(p.steps) for p in paths]})


def parse_paths_document(data: bytes | str) -> list[TestPath]:
    doc = _load_json(data)
    if not isinstance(doc, dict) or not isinstance(doc.get("paths"), list):
        raise MalformedDocument('path document needs a "paths" array')
    paths = []
    for i, raw in enumerate(doc["paths"]):
        if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
            raise MalformedDocument(f"path {i} must be an array of strings")
        paths.append(TestPath(tuple(raw)))
    return paths


def test_case_to_dict(tc: TestCase) -> dict:
    return {
        "id": tc.id,
        "title": tc.title,
        "preconditions": list(tc.preconditions),
        "steps": [{"action": s.action, "expected_result": s.expected_result} for s in tc.steps],
        "source_path_index": tc.source_path_index,
    }


def test_case_from_dict(raw: Any, default_id: str = "", default_index: int = 0) -> TestCase:
    if not isinstance(raw, dict):
        raise MalformedDocument("test case must be an object")
    title = raw.get("title")
    if not isinstance(title, str) or not title.strip():
        raise MalformedDocument("test case needs a non-empty title")
    pre = raw.get("preconditions", [])
    if isinstance(pre, str):
        pre = [pre]
    if not isinstance(pre, list) or not all(isinstance(p, str) for p in pre):
        raise MalformedDocument("preconditions must be a list of strings")
    raw_steps = raw.get("steps")
    if not isinstance(raw_steps, list) or not raw_steps:
        raise MalformedDocument("test case needs a non-empty steps array")
    steps = []
    for j, s in enumerate(raw_steps):
        if not isinstance(s, dict):
            raise MalformedDocument(f"step {j} is not an object")
        action, expected = s.get("action"), s.get("expected_result")
        if not isinstance(action, str) or not action.strip():
            raise MalformedDocument(f"step {j} has no action")
        if not isinstance(expected, str):
            raise MalformedDocument(f"step {j} has no expected_result")
        steps.append(TestStep(action, expected))
    index = raw.get("source_path_index", default_index)
    if isinstance(index, bool) or not isinstance(index, int) or index < 0:
        raise MalformedDocument("source_path_index must be a non-negative integer")
    return TestCase(
        id=str(raw.get("id") or default_id),
        title=title,
        preconditions=tuple(pre),
        steps=tuple(steps),
        source_path_index=index,
    )


def serialize_test_cases_document(cases: Sequence[TestCase]) -> str:
    return _dump({"test_cases": [test_case_to_dict(tc) for tc in cases]})


def parse_test_cases_document(data: bytes | str) -> list[TestCase]:
    doc = _load_json(data)
    if not isinstance(doc, dict) or not isinstance(doc.get("test_cases"), list):
        raise MalformedDocument('test-case document needs a "test_cases" array')
    return [test_case_from_dict(raw) for raw in doc["test_cases"]]


@dataclass
class Dataset:
    name: str
    use_cases: list[UseCase] = field(default_factory=list)
    ground_truth: dict[str, Cfg] = field(default_factory=dict)
    truth_warnings: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ids = [uc.id for uc in self.use_cases]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate use-case ids in dataset {self.name!r}")
        orphans = sorted(set(self.ground_truth) - set(ids))
        if orphans:
            raise ValueError(f"ground truth for unknown use cases: {orphans}")

    def get(self, use_case_id: str) -> UseCase:
        for uc in self.use_cases:
            if uc.id == use_case_id:
                return uc
        raise KeyError(use_case_id)
