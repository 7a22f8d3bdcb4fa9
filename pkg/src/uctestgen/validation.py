"""Structural validity checks applied to every generated or ingested CFG."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Union

from .model import Cfg


class Rule(str, enum.Enum):
    EMPTY_NODE_LIST = "EmptyNodeList"
    ISOLATED_NODE = "IsolatedNode"
    UNREACHABLE_SECONDARY_ROOT = "UnreachableSecondaryRoot"
    ORPHANED_REFERENCE = "OrphanedReference"


@dataclass(frozen=True)
class Failure:
    rule: Rule
    subject: Union[str, int]  # node id, or edge index for orphaned references
    detail: str

    def to_dict(self) -> dict:
        return {"rule": self.rule.value, "subject": self.subject, "detail": self.detail}


@dataclass(frozen=True)
class ValidationVerdict:
    failures: tuple[Failure, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.valid

    def to_dict(self) -> dict:
        return {"valid": self.valid, "failures": [f.to_dict() for f in self.failures]}

    def summary(self) -> str:
        if self.valid:
            return "valid"
        return "; ".join(f"{f.rule.value}({f.subject}): {f.detail}" for f in self.failures)


def validate_cfg(cfg: Cfg, strict_reachability: bool = False) -> ValidationVerdict:
    """Report every structural failure of ``cfg``.

    Rules run in a fixed order: empty node list, orphaned edge references,
    isolated nodes, then non-root nodes without incoming edges. A node that is
    already isolated is not reported again as a secondary root. A one-node,
    zero-edge graph is valid.

    With ``strict_reachability`` every node must also be reachable from the
    root along edges, not merely have some incoming edge.
    """
    if not cfg.nodes:
        return ValidationVerdict((Failure(Rule.EMPTY_NODE_LIST, "", "node list is empty"),))

    failures: list[Failure] = []
    ids = cfg.node_ids
    known = set(ids)
    for i, edge in enumerate(cfg.edges):
        for field_name, ref in (("from", edge.source), ("to", edge.target)):
            if ref not in known:
                failures.append(
                    Failure(Rule.ORPHANED_REFERENCE, i, f"edge {field_name} {ref!r} is not a node")
                )

    mentioned = {e.source for e in cfg.edges} | {e.target for e in cfg.edges}
    isolated = set()
    if len(ids) > 1:
        for node_id in ids:
            if node_id not in mentioned:
                isolated.add(node_id)
                failures.append(Failure(Rule.ISOLATED_NODE, node_id, "node appears in no edge"))

    has_incoming = {e.target for e in cfg.edges if e.source in known}
    root = ids[0]
    for node_id in ids[1:]:
        if node_id not in isolated and node_id not in has_incoming:
            failures.append(
                Failure(Rule.UNREACHABLE_SECONDARY_ROOT, node_id, "non-root node has no incoming edge")
            )

    if strict_reachability:
        reached = _reachable(cfg, root)
        flagged = {f.subject for f in failures if f.rule is not Rule.ORPHANED_REFERENCE}
        for node_id in ids:
            if node_id not in reached and node_id not in flagged:
                failures.append(
                    Failure(Rule.UNREACHABLE_SECONDARY_ROOT, node_id, "node is not reachable from the root")
                )
    return ValidationVerdict(tuple(failures))


def _reachable(cfg: Cfg, root: str) -> set[str]:
    succ: dict[str, list[str]] = {}
    for e in cfg.edges:
        succ.setdefault(e.source, []).append(e.target)
    seen = {root}
    queue = deque([root])
    while queue:
        for nxt in succ.get(queue.popleft(), ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen
