"""Test-path extraction: DFS over the CFG with cycle pruning."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .model import CONDITION_PREFIX, Cfg, TestPath

MAX_PATHS = 10_000
MAX_DEPTH = 500

AdjacencyList = dict[str, list[tuple[str, Optional[str]]]]


class PathBudgetExceeded(RuntimeError):
    pass


class UnknownNodeId(KeyError):
    pass


@dataclass(frozen=True)
class NodePath:
    """A saved DFS path: node ids plus the condition on the edge entering each node."""

    nodes: tuple[str, ...]
    conditions: tuple[Optional[str], ...]


@dataclass(frozen=True)
class PathSet:
    node_paths: tuple[tuple[str, ...], ...]
    translated: tuple[TestPath, ...]

    def __len__(self) -> int:
        return len(self.translated)


def build_adjacency(cfg: Cfg) -> AdjacencyList:
    adj: AdjacencyList = {node_id: [] for node_id in cfg.node_ids}
    for edge in cfg.edges:
        adj.setdefault(edge.source, []).append((edge.target, edge.condition))
    return adj


def enumerate_paths(cfg: Cfg, max_paths: int = MAX_PATHS, max_depth: int = MAX_DEPTH) -> list[NodePath]:
    """All DFS paths from the root, in edge-declaration order.

    A branch stops when it reaches a node with no successors (that node is
    included) or re-enters a node already on the path (that node is not
    repeated). Iterative so deep graphs do not hit the recursion limit.
    """
    if not cfg.nodes:
        return []
    adj = build_adjacency(cfg)
    found: list[NodePath] = []

    def save(nodes: tuple[str, ...], conds: tuple[Optional[str], ...]) -> None:
        if len(found) >= max_paths:
            raise PathBudgetExceeded(f"more than {max_paths} paths")
        found.append(NodePath(nodes, conds))

    # stack frames: (node to visit, nodes so far, conditions so far, condition of entering edge)
    stack = [(cfg.node_ids[0], (), (), None)]
    while stack:
        curr, nodes, conds, cond = stack.pop()
        if curr in nodes:
            save(nodes, conds)
            continue
        nodes, conds = nodes + (curr,), conds + (cond,)
        if len(nodes) > max_depth:
            raise PathBudgetExceeded(f"path deeper than {max_depth} nodes")
        successors = adj.get(curr, [])
        if not successors:
            save(nodes, conds)
            continue
        for nbr, nbr_cond in reversed(successors):
            stack.append((nbr, nodes, conds, nbr_cond))
    return found


def enumerate_node_paths(cfg: Cfg, max_paths: int = MAX_PATHS, max_depth: int = MAX_DEPTH) -> list[list[str]]:
    return [list(p.nodes) for p in enumerate_paths(cfg, max_paths, max_depth)]


def _first_condition(cfg: Cfg, source: str, target: str) -> Optional[str]:
    for edge in cfg.edges:
        if edge.source == source and edge.target == target:
            return edge.condition
    return None


def translate_paths(cfg: Cfg, node_paths: Sequence[NodePath | Sequence[str]]) -> PathSet:
    """Replace ids with statements and insert ``condition: ...`` steps.

    Plain id sequences take the condition of the first edge joining each
    consecutive pair; :class:`NodePath` values keep their own.
    """
    statements = cfg.statements()
    id_paths, translated = [], []
    for path in node_paths:
        if isinstance(path, NodePath):
            nodes, conds = path.nodes, path.conditions
        else:
            nodes = tuple(path)
            conds = (None,) + tuple(_first_condition(cfg, a, b) for a, b in zip(nodes, nodes[1:]))
        steps: list[str] = []
        for node_id, cond in zip(nodes, conds):
            if node_id not in statements:
                raise UnknownNodeId(node_id)
            if cond is not None:
                steps.append(CONDITION_PREFIX + cond)
            steps.append(statements[node_id])
        id_paths.append(nodes)
        translated.append(TestPath(tuple(steps)))
    return PathSet(tuple(id_paths), tuple(translated))


def extract_paths(cfg: Cfg, max_paths: int = MAX_PATHS, max_depth: int = MAX_DEPTH) -> PathSet:
    return translate_paths(cfg, enumerate_paths(cfg, max_paths, max_depth))
