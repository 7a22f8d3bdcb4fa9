"""Node/edge matching and the scalar agreement metrics."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..model import Cfg
from .assignment import solve_assignment
from .similarity import SimilarityConfig, similarity_matrix


class EmptyRecordSet(ValueError):
    pass


@dataclass(frozen=True)
class Counts:
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[str, str, float], ...]
    node_counts: Counts
    edge_counts: Counts = Counts(0, 0, 0)

    @property
    def mapping(self) -> dict[str, str]:
        """Generated node id -> truth node id for every accepted pair."""
        return {g: t for g, t, _ in self.pairs}


@dataclass(frozen=True)
class PathCountRecord:
    use_case_id: str
    generated_path_count: int
    truth_path_count: int

    def __post_init__(self) -> None:
        if self.generated_path_count < 0 or self.truth_path_count < 0:
            raise ValueError("path counts must be non-negative")

    @property
    def delta(self) -> int:
        return abs(self.generated_path_count - self.truth_path_count)


def prf1(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision, recall and F1.

    Empty denominators: precision is 1 when nothing was generated and nothing
    was missed, else 0; recall likewise. Comparing two empty graphs scores
    (1, 1, 1).
    """
    if min(tp, fp, fn) < 0:
        raise ValueError("counts must be non-negative")
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 1.0 if fn == 0 else 0.0
    if tp + fn:
        recall = tp / (tp + fn)
    else:
        recall = 1.0 if fp == 0 else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return precision, recall, f1


def compare_edges(generated: Cfg, truth: Cfg, mapping: dict[str, str]) -> Counts:
    """Directed edge agreement after relabelling matched generated nodes.

    Conditions and weights are ignored; parallel edges compare as multisets.
    An edge with an unmatched endpoint can never be a true positive.
    """
    def relabel(node_id: str):
        return mapping.get(node_id, ("unmatched", node_id))

    truth_ids = set(mapping.values())
    gen = Counter((relabel(e.source), relabel(e.target)) for e in generated.edges)
    ref = Counter(
        (e.source, e.target) if e.source in truth_ids and e.target in truth_ids else ("unmatched-truth", i)
        for i, e in enumerate(truth.edges)
    )
    tp = sum((gen & ref).values())
    return Counts(tp, len(generated.edges) - tp, len(truth.edges) - tp)


def match_nodes(generated: Cfg, truth: Cfg, config: SimilarityConfig = SimilarityConfig()) -> MatchResult:
    """Optimal statement matching, thresholded, followed by edge comparison."""
    scores = similarity_matrix(
        [n.statement for n in generated.nodes], [n.statement for n in truth.nodes], config
    )
    pairs = []
    for r, c in solve_assignment(scores):
        if scores[r, c] >= config.threshold:
            pairs.append((generated.nodes[r].id, truth.nodes[c].id, float(scores[r, c])))
    tp = len(pairs)
    nodes = Counts(tp, len(generated.nodes) - tp, len(truth.nodes) - tp)
    edges = compare_edges(generated, truth, {g: t for g, t, _ in pairs})
    return MatchResult(tuple(pairs), nodes, edges)


def discrepancy_rate(records: Sequence[PathCountRecord]) -> float:
    """Percentage of use cases whose generated path count differs from the truth."""
    if not records:
        raise EmptyRecordSet("no path-count records")
    n_diff = sum(1 for r in records if r.generated_path_count != r.truth_path_count)
    return 100.0 * n_diff / len(records)


def avg_abs_delta(records: Sequence[PathCountRecord]) -> float:
    if not records:
        raise EmptyRecordSet("no path-count records")
    return sum(r.delta for r in records) / len(records)
