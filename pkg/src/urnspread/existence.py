"""Exact check of whether the log-likelihood attains its maximum.

The maximiser fails to exist iff some direction ``v`` makes every chosen
alternative weakly the heaviest active one at its step, strictly somewhere.
That is decided by the LP

    max  sum_r D_r . v   s.t.  D v >= 0,  ||v||_inf <= 1

where the rows of ``D`` are ``x_{chosen} - x_f`` over steps and active ``f``.
Rows are deduplicated and scaled to unit max-norm first; neither changes the
sign of the optimum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPSizeError
from .likelihood import LikelihoodContext
from .simplex import simplex_max

EXISTS = "Exists"
NOT_EXISTS = "NotExists"
FLAT_DIRECTION = "FlatDirection"

DEFAULT_MAX_ROWS = 5000


@dataclass(frozen=True)
class ExistenceResult:
    status: str
    direction: np.ndarray | None
    objective: float

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "direction": None if self.direction is None else [float(v) for v in self.direction],
            "objective": float(self.objective),
        }


def difference_rows(ctx: LikelihoodContext) -> np.ndarray:
    """Unique nonzero rows ``x_{e_t} - x_f`` over steps ``t`` and active ``f``."""
    if ctx.k == 1:
        return np.zeros((0, ctx.d))
    steps, alts = np.nonzero(ctx.B > 0)
    D = ctx.X[ctx.chosen[steps]] - ctx.X[alts]
    D = D[np.any(D != 0.0, axis=1)]
    if D.shape[0] == 0:
        return D
    D = D / np.max(np.abs(D), axis=1, keepdims=True)
    return np.unique(D, axis=0)


def _flat_direction(ctx: LikelihoodContext) -> np.ndarray | None:
    """A unit ``v`` with ``x_f . v`` constant over every alternative ever active, if any."""
    if ctx.k == 1:
        active = np.zeros(0, dtype=np.int64)
    else:
        active = np.flatnonzero(ctx.B[-1] > 0)
    if active.size <= 1:
        v = np.zeros(ctx.d)
        v[0] = 1.0
        return v
    diffs = ctx.X[active[1:]] - ctx.X[active[0]]
    _, sv, Vt = np.linalg.svd(diffs, full_matrices=True)
    cutoff = 1e-9 * (sv[0] if sv.size and sv[0] > 0 else 1.0)
    rank = int(np.sum(sv > cutoff))
    if rank == ctx.d:
        return None
    return Vt[rank]


def check_mle_existence(ctx: LikelihoodContext, max_rows: int = DEFAULT_MAX_ROWS,
                        threshold: float = 1e-9) -> ExistenceResult:
    """Classify the data as ``Exists``, ``NotExists`` (with a recession direction)
    or ``FlatDirection`` (a maximum exists but the likelihood is constant along ``v``)."""
    D = difference_rows(ctx)
    if D.shape[0] > max_rows:
        raise LPSizeError(f"{D.shape[0]} distinct constraint rows exceeds the limit of {max_rows}")
    d = ctx.d
    objective = 0.0
    if D.shape[0]:
        g = D.sum(axis=0)
        # v = v_plus - v_minus with 0 <= v_plus, v_minus <= 1
        A = np.block([
            [-D, D],
            [np.eye(d), np.zeros((d, d))],
            [np.zeros((d, d)), np.eye(d)],
        ])
        rhs = np.concatenate([np.zeros(D.shape[0]), np.ones(2 * d)])
        res = simplex_max(np.concatenate([g, -g]), A, rhs)
        objective = res.value
        if objective > threshold:
            v = res.x[:d] - res.x[d:]
            return ExistenceResult(NOT_EXISTS, v, objective)
    flat = _flat_direction(ctx)
    if flat is not None:
        return ExistenceResult(FLAT_DIRECTION, flat, objective)
    return ExistenceResult(EXISTS, None, objective)
