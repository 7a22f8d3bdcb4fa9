"""Maximum-similarity one-to-one matching."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment


def solve_assignment(scores) -> list[tuple[int, int]]:
    """Pairs ``(row, col)`` maximising the total score, sorted by row.

    Rectangular inputs yield ``min(m, n)`` pairs; every row (or column, on
    the shorter side) is matched even when its best score is negative.
    """
    s = np.asarray(scores, dtype=float)
    if s.ndim != 2:
        raise ValueError("score matrix must be 2-D")
    if s.size == 0:
        return []
    if not np.all(np.isfinite(s)):
        raise ValueError("score matrix must be finite")
    rows, cols = linear_sum_assignment(s, maximize=True)
    return [(int(r), int(c)) for r, c in zip(rows, cols)]


def assignment_total(scores, pairs) -> float:
    s = np.asarray(scores, dtype=float)
    return float(sum(s[r, c] for r, c in pairs))
