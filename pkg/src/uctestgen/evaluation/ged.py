"""Structural graph edit distance between CFGs.

Cost model: node insertion/deletion 1, edge insertion/deletion 1, any node
or edge substitution 0. Under this model an optimal edit path maps every
node of the smaller graph onto a distinct node of the larger one, so the
exact search enumerates injective mappings only.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional

from ..model import Cfg

EXACT_NODE_CAP = 12


class SizeCapExceeded(ValueError):
    pass


class UndefinedForEmptyPair(ValueError):
    pass


@dataclass(frozen=True)
class GedResult:
    distance: int
    exact: bool


def _edges(cfg: Cfg) -> Counter:
    return Counter((e.source, e.target) for e in cfg.edges)


def mapping_cost(g1: Cfg, g2: Cfg, mapping: Mapping[str, str]) -> int:
    """Edit cost induced by a partial injective node mapping from ``g1`` to ``g2``."""
    if len(set(mapping.values())) != len(mapping):
        raise ValueError("mapping is not injective")
    ids2 = set(g2.node_ids)
    relabel = {}
    for node_id in g1.node_ids:
        target = mapping.get(node_id)
        relabel[node_id] = target if target in ids2 else ("deleted", node_id)
    m1 = Counter((relabel.get(a, ("deleted", a)), relabel.get(b, ("deleted", b))) for a, b in _edges(g1).elements())
    m2 = _edges(g2)
    mapped = sum(1 for v in relabel.values() if v in ids2)
    node_cost = (len(g1.nodes) - mapped) + (len(g2.nodes) - mapped)
    edge_cost = sum(abs(m1[p] - m2[p]) for p in m1.keys() | m2.keys())
    return node_cost + edge_cost


def _exact(small: Cfg, large: Cfg) -> int:
    ns, nl = len(small.nodes), len(large.nodes)
    es, el = _edges(small), _edges(large)
    if ns == 0:
        return nl + sum(el.values())

    degree = Counter()
    for (a, b), k in es.items():
        degree[a] += k
        degree[b] += k
    order = sorted(small.node_ids, key=lambda n: (-degree[n], small.node_ids.index(n)))
    large_ids = large.node_ids
    total_s, total_l = sum(es.values()), sum(el.values())

    best = mapping_cost(small, large, dict(zip(order, large_ids)))
    assigned: dict[str, str] = {}
    used: set[str] = set()

    def step(depth: int, cost: int, done_s: int, done_l: int) -> None:
        nonlocal best
        if cost + abs((total_s - done_s) - (total_l - done_l)) + (nl - ns) >= best:
            return
        if depth == ns:
            # undecided edges touch unused or unknown nodes: pure insertions/deletions
            best = min(best, cost + (total_s - done_s) + (total_l - done_l) + (nl - ns))
            return
        u = order[depth]
        for v in large_ids:
            if v in used:
                continue
            delta, ds, dl = 0, 0, 0
            k_s, k_l = es.get((u, u), 0), el.get((v, v), 0)
            delta += abs(k_s - k_l)
            ds += k_s
            dl += k_l
            for w, x in assigned.items():
                for p_s, p_l in (((u, w), (v, x)), ((w, u), (x, v))):
                    k_s, k_l = es.get(p_s, 0), el.get(p_l, 0)
                    delta += abs(k_s - k_l)
                    ds += k_s
                    dl += k_l
            assigned[u] = v
            used.add(v)
            step(depth + 1, cost + delta, done_s + ds, done_l + dl)
            del assigned[u]
            used.discard(v)

    step(0, 0, 0, 0)
    return best


def ged(g1: Cfg, g2: Cfg, cap: int = EXACT_NODE_CAP) -> int:
    """Exact structural edit distance; raises :class:`SizeCapExceeded` above ``cap`` nodes."""
    if len(g1.nodes) > cap or len(g2.nodes) > cap:
        raise SizeCapExceeded(
            f"exact GED limited to {cap} nodes per graph "
            f"(got {len(g1.nodes)} and {len(g2.nodes)}); use ged_upper_bound"
        )
    small, large = (g1, g2) if len(g1.nodes) <= len(g2.nodes) else (g2, g1)
    return _exact(small, large)


def ged_upper_bound(g1: Cfg, g2: Cfg, seed: Optional[Mapping[str, str]] = None) -> int:
    """Cost of the mapping ``seed`` (g1 id -> g2 id) extended greedily in node order."""
    mapping = dict(seed or {})
    free = [n for n in g2.node_ids if n not in set(mapping.values())]
    for node_id in g1.node_ids:
        if node_id not in mapping and free:
            mapping[node_id] = free.pop(0)
    return mapping_cost(g1, g2, mapping)


def graph_edit_distance(
    g1: Cfg, g2: Cfg, cap: int = EXACT_NODE_CAP, seed: Optional[Mapping[str, str]] = None
) -> GedResult:
    """Exact GED when both graphs fit under ``cap``, otherwise a flagged upper bound."""
    if len(g1.nodes) <= cap and len(g2.nodes) <= cap:
        return GedResult(ged(g1, g2, cap), True)
    return GedResult(ged_upper_bound(g1, g2, seed), False)


def normalize(distance: float, g1: Cfg, g2: Cfg) -> float:
    size = len(g1.nodes) + len(g1.edges) + len(g2.nodes) + len(g2.edges)
    if size == 0:
        raise UndefinedForEmptyPair("nGED is undefined for two empty graphs")
    return 1.0 - distance / size


def nged(g1: Cfg, g2: Cfg, cap: int = EXACT_NODE_CAP) -> float:
    if not (g1.nodes or g1.edges or g2.nodes or g2.edges):
        raise UndefinedForEmptyPair("nGED is undefined for two empty graphs")
    return normalize(ged(g1, g2, cap), g1, g2)
