"""Asymptotic standard errors and confidence intervals for the exponential-weight MLE."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .likelihood import LikelihoodContext, covariance_sum

# Acklam's rational approximation to the standard normal quantile.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF.

    Acklam's approximation (relative error ~1e-9) followed by one Halley step
    against ``math.erfc``, which brings it to near machine precision.
    """
    if not 0.0 < p < 1.0:
        if p == 0.0:
            return -math.inf
        if p == 1.0:
            return math.inf
        raise ValueError("p must lie in [0, 1]")
    if p > 0.5:
        # reflect so the Halley residual is taken in the accurate lower tail
        return -normal_quantile(1.0 - p)
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    else:
        q = p - 0.5
        r = q * q
        x = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
            (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


@dataclass
class InferenceResult:
    beta: np.ndarray
    info_hat: np.ndarray
    se: np.ndarray
    ci: np.ndarray
    tstats: np.ndarray
    numerical_flag: bool
    alpha: float

    def to_dict(self) -> dict:
        def clean(a):
            return [None if not np.isfinite(v) else float(v) for v in np.asarray(a).ravel()]

        return {
            "se": clean(self.se),
            "ci": [clean(row) for row in self.ci],
            "tstats": clean(self.tstats),
            "numerical_flag": bool(self.numerical_flag),
            "alpha": self.alpha,
        }


def information_estimate(ctx: LikelihoodContext, beta_hat, burn_in: int = 0) -> np.ndarray:
    """Average conditional covariance of the chosen covariates at ``beta_hat``.

    With ``burn_in = K`` the first ``K`` steps are dropped and the sum is divided
    by ``k - K``; ``K = 0`` gives exactly ``-hessian / k``.
    """
    if not 0 <= burn_in < ctx.k:
        raise ValueError("burn-in must satisfy 0 <= K < k")
    return covariance_sum(ctx, beta_hat, burn_in=burn_in) / (ctx.k - burn_in)


def symmetric_inverse(A, pivot_tol: float = 1e-12):
    """Inverse of a symmetric matrix through an unpivoted LDL^T factorisation.

    Returns ``None`` when a pivot falls below ``pivot_tol`` times the largest
    diagonal magnitude.  Indefinite but nonsingular input is inverted as is.
    """
    A = np.array(A, dtype=float)
    d = A.shape[0]
    scale = max(float(np.max(np.abs(np.diag(A)), initial=0.0)), np.finfo(float).tiny)
    L = np.eye(d)
    D = np.zeros(d)
    for j in range(d):
        D[j] = A[j, j] - np.sum(L[j, :j] ** 2 * D[:j])
        if abs(D[j]) <= pivot_tol * scale:
            return None
        for i in range(j + 1, d):
            L[i, j] = (A[i, j] - np.sum(L[i, :j] * L[j, :j] * D[:j])) / D[j]
    Linv = np.linalg.solve(L, np.eye(d))
    inv = Linv.T @ (Linv / D[:, None])
    return 0.5 * (inv + inv.T)


def standard_errors_ci(info_hat, beta_hat, k: int, alpha: float = 0.05, burn_in: int = 0) -> InferenceResult:
    """Wald intervals ``beta_hat +- z * sqrt([I^-1]_aa / (k - K))``.

    A singular information matrix or a non-positive diagonal in its inverse
    sets ``numerical_flag``; affected coordinates get NaN standard errors.
    """
    info_hat = np.asarray(info_hat, dtype=float)
    beta_hat = np.asarray(beta_hat, dtype=float).reshape(-1)
    d = beta_hat.shape[0]
    if info_hat.shape != (d, d):
        raise ValueError("information matrix does not match beta")
    if not 0 <= burn_in < k:
        raise ValueError("burn-in must satisfy 0 <= K < k")
    z = normal_quantile(1.0 - alpha / 2.0)
    inv = symmetric_inverse(info_hat)
    if inv is None:
        se = np.full(d, np.nan)
        flag = True
    else:
        diag = np.diag(inv)
        flag = bool(np.any(diag <= 0))
        se = np.where(diag > 0, np.sqrt(np.abs(diag) / (k - burn_in)), np.nan)
    ci = np.column_stack([beta_hat - z * se, beta_hat + z * se])
    return InferenceResult(beta_hat, info_hat, se, ci, wald_stats(beta_hat, se), flag, alpha)


def wald_stats(beta_hat, se) -> np.ndarray:
    """``|beta_a / se_a|``; NaN where the standard error is zero or missing."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    se = np.asarray(se, dtype=float)
    ok = np.isfinite(se) & (se > 0)
    return np.where(ok, np.abs(beta_hat) / np.where(ok, se, 1.0), np.nan)


def wald_report(result: InferenceResult, names=None) -> list[dict]:
    """Coordinates sorted by decreasing ``|t|`` (NaN last, then by index)."""
    d = result.beta.shape[0]
    names = [f"x{a + 1}" for a in range(d)] if names is None else list(names)
    rows = [
        {"name": names[a], "beta": float(result.beta[a]), "se": float(result.se[a]),
         "t": float(result.tstats[a])}
        for a in range(d)
    ]
    return sorted(rows, key=lambda r: (math.isnan(r["t"]), -r["t"] if not math.isnan(r["t"]) else 0.0))


def infer(ctx: LikelihoodContext, beta_hat, alpha: float = 0.05, burn_in: int = 0) -> InferenceResult:
    """Information estimate plus intervals in one call."""
    info = information_estimate(ctx, beta_hat, burn_in=burn_in)
    return standard_errors_ci(info, beta_hat, ctx.k, alpha=alpha, burn_in=burn_in)
