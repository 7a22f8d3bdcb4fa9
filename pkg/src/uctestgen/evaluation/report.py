"""Per-use-case evaluation rows and the aggregated report."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from ..model import Cfg
from ..paths import enumerate_paths
from .ged import EXACT_NODE_CAP, graph_edit_distance, normalize
from .metrics import PathCountRecord, avg_abs_delta, discrepancy_rate, match_nodes, prf1
from .similarity import SimilarityConfig

TOLERANCE = 1e-9

_AVERAGED = (
    "node_precision", "node_recall", "node_f1",
    "edge_precision", "edge_recall", "edge_f1", "nged",
)


class ReportInconsistent(ValueError):
    pass


@dataclass(frozen=True)
class UseCaseRow:
    use_case_id: str
    generated_nodes: int
    truth_nodes: int
    node_tp: int
    node_fp: int
    node_fn: int
    edge_tp: int
    edge_fp: int
    edge_fn: int
    node_precision: float
    node_recall: float
    node_f1: float
    edge_precision: float
    edge_recall: float
    edge_f1: float
    ged: int
    ged_exact: bool
    nged: float
    generated_path_count: int
    truth_path_count: int

    @property
    def record(self) -> PathCountRecord:
        return PathCountRecord(self.use_case_id, self.generated_path_count, self.truth_path_count)


def evaluate_use_case(
    use_case_id: str,
    generated: Cfg,
    truth: Cfg,
    config: SimilarityConfig = SimilarityConfig(),
    ged_cap: int = EXACT_NODE_CAP,
) -> UseCaseRow:
    match = match_nodes(generated, truth, config)
    n, e = match.node_counts, match.edge_counts
    node_p, node_r, node_f = prf1(n.tp, n.fp, n.fn)
    edge_p, edge_r, edge_f = prf1(e.tp, e.fp, e.fn)
    dist = graph_edit_distance(generated, truth, ged_cap, seed=match.mapping)
    return UseCaseRow(
        use_case_id=use_case_id,
        generated_nodes=len(generated.nodes),
        truth_nodes=len(truth.nodes),
        node_tp=n.tp, node_fp=n.fp, node_fn=n.fn,
        edge_tp=e.tp, edge_fp=e.fp, edge_fn=e.fn,
        node_precision=node_p, node_recall=node_r, node_f1=node_f,
        edge_precision=edge_p, edge_recall=edge_r, edge_f1=edge_f,
        ged=dist.distance,
        ged_exact=dist.exact,
        nged=normalize(dist.distance, generated, truth),
        generated_path_count=len(enumerate_paths(generated)),
        truth_path_count=len(enumerate_paths(truth)),
    )


def aggregate(rows: Sequence[UseCaseRow]) -> dict:
    if not rows:
        return {"n_ucs": 0}
    records = [r.record for r in rows]
    out = {f"avg_{name}": sum(getattr(r, name) for r in rows) / len(rows) for name in _AVERAGED}
    out.update(
        total_generated_nodes=sum(r.generated_nodes for r in rows),
        total_truth_nodes=sum(r.truth_nodes for r in rows),
        total_generated_paths=sum(r.generated_path_count for r in rows),
        total_truth_paths=sum(r.truth_path_count for r in rows),
        n_diff=sum(1 for r in records if r.generated_path_count != r.truth_path_count),
        n_ucs=len(rows),
        discrepancy_rate=discrepancy_rate(records),
        avg_abs_delta=avg_abs_delta(records),
        all_ged_exact=all(r.ged_exact for r in rows),
    )
    return out


@dataclass
class EvalReport:
    rows: list[UseCaseRow]

    @property
    def aggregates(self) -> dict:
        return aggregate(self.rows)

    def to_dict(self) -> dict:
        return {"rows": [asdict(r) for r in self.rows], "aggregates": self.aggregates}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping) -> "EvalReport":
        """Rebuild a report; stored aggregates must match recomputation."""
        report = cls([UseCaseRow(**row) for row in doc["rows"]])
        stored = doc.get("aggregates", {})
        for key, value in report.aggregates.items():
            if key not in stored:
                continue
            other = stored[key]
            if isinstance(value, float) or isinstance(other, float):
                if not math.isclose(value, other, rel_tol=0.0, abs_tol=TOLERANCE):
                    raise ReportInconsistent(f"aggregate {key}: stored {other}, recomputed {value}")
            elif value != other:
                raise ReportInconsistent(f"aggregate {key}: stored {other}, recomputed {value}")
        return report

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        """Table with one line per use case plus a totals/averages line."""
        columns = [
            "use_case", "gen_nodes", "truth_nodes",
            "node_precision", "node_recall", "node_f1",
            "edge_precision", "edge_recall", "edge_f1", "nged",
            "gen_paths", "truth_paths", "abs_delta",
        ]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in self.rows:
            writer.writerow([
                r.use_case_id, r.generated_nodes, r.truth_nodes,
                *(f"{getattr(r, k):.3f}" for k in _AVERAGED),
                r.generated_path_count, r.truth_path_count, r.record.delta,
            ])
        if self.rows:
            agg = self.aggregates
            writer.writerow([
                "Total", agg["total_generated_nodes"], agg["total_truth_nodes"],
                *(f"{agg['avg_' + k]:.3f}" for k in _AVERAGED),
                agg["total_generated_paths"], agg["total_truth_paths"], f"{agg['avg_abs_delta']:.2f}",
            ])
            writer.writerow(["Discrepancy Rate (%)", f"{agg['discrepancy_rate']:.2f}"])
        return buf.getvalue()
