"""Agreement metrics between generated and ground-truth CFGs."""

from .assignment import solve_assignment
from .ged import SizeCapExceeded, UndefinedForEmptyPair, ged, ged_upper_bound, graph_edit_distance, nged
from .metrics import (
    Counts,
    EmptyRecordSet,
    MatchResult,
    PathCountRecord,
    avg_abs_delta,
    compare_edges,
    discrepancy_rate,
    match_nodes,
    prf1,
)
from .report import EvalReport, ReportInconsistent, UseCaseRow, evaluate_use_case
from .similarity import EndpointError, SimilarityConfig, SimilarityProvider, similarity, similarity_matrix

__all__ = [
    "Counts", "EmptyRecordSet", "EndpointError", "EvalReport", "MatchResult", "PathCountRecord",
    "ReportInconsistent", "SimilarityConfig", "SimilarityProvider", "SizeCapExceeded",
    "UndefinedForEmptyPair", "UseCaseRow", "avg_abs_delta", "compare_edges", "discrepancy_rate",
    "evaluate_use_case", "ged", "ged_upper_bound", "graph_edit_distance", "match_nodes", "nged",
    "prf1", "similarity", "similarity_matrix", "solve_assignment",
]
