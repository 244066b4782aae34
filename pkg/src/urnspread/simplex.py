"""Dense tableau primal simplex for small LPs with a feasible origin.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``, so the slack basis
is feasible and no phase one is needed.  Bland's rule guards against cycling
on the degenerate problems the existence check produces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    status: str
    pivots: int


def simplex_max(c, A, b, eps: float = 1e-11, max_pivots: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=float).reshape(-1)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    rows, cols = A.shape
    if c.shape[0] != cols or b.shape[0] != rows:
        raise ValueError("inconsistent LP dimensions")
    if np.any(b < 0):
        raise ValueError("simplex_max needs b >= 0 (origin must be feasible)")
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    tol = eps * scale

    T = np.zeros((rows + 1, cols + rows + 1))
    T[:rows, :cols] = A
    T[:rows, cols:cols + rows] = np.eye(rows)
    T[:rows, -1] = b
    T[rows, :cols] = -c
    basis = np.arange(cols, cols + rows)

    pivots = 0
    status = OPTIMAL
    while True:
        reduced = T[rows, :-1]
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            break
        j = int(candidates[0])
        column = T[:rows, j]
        positive = np.flatnonzero(column > tol)
        if positive.size == 0:
            status = UNBOUNDED
            break
        ratios = T[positive, -1] / column[positive]
        best = ratios.min()
        tied = positive[ratios <= best + tol * max(1.0, abs(best))]
        i = int(tied[np.argmin(basis[tied])])
        T[i] /= T[i, j]
        others = np.arange(rows + 1) != i
        T[others] -= np.outer(T[others, j], T[i])
        basis[i] = j
        pivots += 1
        if pivots >= max_pivots:
            raise RuntimeError("simplex pivot limit reached")

    x = np.zeros(cols + rows)
    x[basis] = T[:rows, -1]
    return LPResult(x[:cols], float(T[rows, -1]), status, pivots)
