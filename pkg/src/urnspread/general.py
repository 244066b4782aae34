"""Per-edge (nonparametric) weight MLE and its projection onto covariate space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, RankDeficient
from .likelihood import CONVERGED, FitResult, LikelihoodContext, fit_mle


@dataclass
class GeneralWeightsResult:
    weights: np.ndarray
    support: np.ndarray
    fit: FitResult

    def to_dict(self, beta_projected=None) -> dict:
        out = {
            "weights": [float(w) for w in self.weights],
            "support": [int(e) + 1 for e in self.support],
            "status": self.fit.status,
        }
        if beta_projected is not None:
            out["beta_projected"] = [float(b) for b in beta_projected]
        return out


def fit_general_weights(ctx: LikelihoodContext, **fit_kwargs) -> GeneralWeightsResult:
    """Maximum likelihood weights, one free parameter per edge.

    Edges that never transmit get weight exactly zero and leave the
    denominators.  The remaining edges are fitted on a log scale with indicator
    covariates, the last observed edge pinned at log-weight 0.  The returned
    weights sum to one.
    """
    if ctx.k == 1:
        raise DataError("no transmissions observed")
    m = ctx.X.shape[0]
    support = np.unique(ctx.chosen)
    m_obs = support.size
    Z = np.zeros((m_obs, m_obs - 1))
    Z[np.arange(m_obs - 1), np.arange(m_obs - 1)] = 1.0
    reduced = ctx.restrict(support, X=Z)
    if m_obs == 1:
        fit = FitResult(np.zeros(0), 0.0, 0.0, 0, CONVERGED, np.zeros((0, 0)))
        z = np.zeros(1)
    else:
        fit = fit_mle(reduced, **fit_kwargs)
        z = np.append(fit.beta, 0.0)
    w = np.zeros(m)
    ez = np.exp(z - z.max())
    w[support] = ez / ez.sum()
    return GeneralWeightsResult(w, support, fit)


def project_to_beta(w_tilde, X, support=None, return_intercept: bool = False):
    """Least-squares fit of ``log w_tilde`` on ``[1 | X]`` over the support.

    The intercept soaks up the arbitrary scale of ``w_tilde``; only the ``d``
    slope coefficients are returned unless ``return_intercept`` is set.
    """
    w_tilde = np.asarray(w_tilde, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if support is None:
        support = np.flatnonzero(w_tilde > 0)
    support = np.asarray(support, dtype=np.int64)
    if np.any(w_tilde[support] <= 0):
        raise ValueError("w_tilde must be strictly positive on the support")
    y = np.log(w_tilde[support])
    Xs = X[support]
    d = X.shape[1]
    if support.size < d + 1:
        raise RankDeficient(f"{support.size} support edges cannot identify {d} slopes and an intercept")
    x_mean = Xs.mean(axis=0)
    y_mean = y.mean()
    Xc = Xs - x_mean
    G = Xc.T @ Xc
    eig = np.linalg.eigvalsh(G)
    if eig[0] <= 1e-12 * max(eig[-1], np.finfo(float).tiny) or eig[-1] <= 0:
        raise RankDeficient("design [1 | X] is rank deficient on the support")
    L = np.linalg.cholesky(G)
    beta = np.linalg.solve(L.T, np.linalg.solve(L, Xc.T @ (y - y_mean)))
    if return_intercept:
        return beta, float(y_mean - x_mean @ beta)
    return beta
