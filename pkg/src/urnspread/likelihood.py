"""Log-likelihood of ordered transmission data under exponential weights, and its MLE.

The model is a sequence of conditional-logit choices: at step ``t`` alternative
``a`` (an edge, or a destination vertex for the source-marginalised process) is
chosen with probability ``b_t(a) exp(x_a . beta) / sum_f b_t(f) exp(x_f . beta)``.
Everything here works on that generic form through :class:`LikelihoodContext`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .simulate import Trace, active_counts

CONVERGED = "Converged"
MAX_ITERS = "MaxIters"
DIVERGED = "Diverged"
NON_EXISTENT = "NonExistent"

# relative size of a log-likelihood change that is indistinguishable from rounding
_ROUNDOFF = 1e-13


@dataclass(frozen=True, eq=False)
class LikelihoodContext:
    """Cached per-step active counts for a fixed data set.

    ``B[i]`` holds ``b_t`` for step ``t = i + 2``; ``chosen[i]`` is the
    alternative picked at that step; ``X`` has one covariate row per alternative.
    """

    X: np.ndarray
    B: np.ndarray
    chosen: np.ndarray
    n: int
    const_terms: np.ndarray = field(default=None)
    logB: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        B = np.asarray(self.B, dtype=float).reshape(-1, X.shape[0])
        chosen = np.asarray(self.chosen, dtype=np.int64).reshape(-1)
        if chosen.shape[0] != B.shape[0]:
            raise ValueError("one chosen alternative per step required")
        steps = np.arange(B.shape[0])
        if B.shape[0] and np.any(B[steps, chosen] <= 0):
            raise ValueError("a chosen alternative has zero active count")
        with np.errstate(divide="ignore"):
            logB = np.log(B)
        if self.const_terms is None:
            const = logB[steps, chosen] if B.shape[0] else np.zeros(0)
        else:
            const = np.asarray(self.const_terms, dtype=float).reshape(-1)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "chosen", chosen)
        object.__setattr__(self, "logB", logB)
        object.__setattr__(self, "const_terms", const)

    @classmethod
    def from_trace(cls, g: Graph, tr: Trace, covariates=None) -> "LikelihoodContext":
        X = g.covariates if covariates is None else covariates
        return cls(X, active_counts(g, tr), tr.events, g.n)

    @property
    def k(self) -> int:
        return self.B.shape[0] + 1

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def restrict(self, alternatives, X=None) -> "LikelihoodContext":
        """Drop every alternative not in ``alternatives`` (they get weight zero)."""
        alternatives = np.asarray(alternatives, dtype=np.int64)
        remap = -np.ones(self.X.shape[0], dtype=np.int64)
        remap[alternatives] = np.arange(alternatives.size)
        chosen = remap[self.chosen]
        if np.any(chosen < 0):
            raise ValueError("cannot drop an alternative that was chosen")
        Xr = self.X[alternatives] if X is None else X
        return LikelihoodContext(Xr, self.B[:, alternatives], chosen, self.n)


def _eta(ctx: LikelihoodContext, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.shape[0] != ctx.d:
        raise ValueError(f"beta has dimension {beta.shape[0]}, expected {ctx.d}")
    return ctx.X @ beta


def _probabilities(ctx: LikelihoodContext, eta: np.ndarray):
    """Per-step choice probabilities and log normalisers (max-shifted).

    The normaliser is ``top + log1p(rest)`` so that tiny non-top masses are
    not lost to rounding.
    """
    logits = ctx.logB + eta[None, :]
    top_idx = logits.argmax(axis=1)
    rows = np.arange(logits.shape[0])
    top = logits[rows, top_idx]
    P = np.exp(logits - top[:, None])
    P[rows, top_idx] = 0.0
    rest = P.sum(axis=1)
    P /= (1.0 + rest)[:, None]
    P[rows, top_idx] = 1.0 / (1.0 + rest)
    return P, top + np.log1p(rest)


# rows of the (steps x alternatives x d) difference tensor built at once
_BLOCK_ELEMS = 1 << 22


def _moments(ctx: LikelihoodContext, P: np.ndarray, chosen: np.ndarray, covariance: bool = True):
    """Score sum and covariance sum with moments taken about ``x_chosen``.

    Working with ``D = x_f - x_{e_t}`` directly keeps full relative precision
    when the chosen alternative carries almost all the mass; the expanded
    ``E[ZZ^T] - E[Z]E[Z]^T`` form cancels catastrophically there.
    """
    d = ctx.d
    g = np.zeros(d)
    C = np.zeros((d, d))
    m = ctx.X.shape[0]
    block = max(1, _BLOCK_ELEMS // max(1, m * d))
    for lo in range(0, P.shape[0], block):
        Pb = P[lo:lo + block]
        D = ctx.X[None, :, :] - ctx.X[chosen[lo:lo + block]][:, None, :]
        mean = np.einsum("tf,tfd->td", Pb, D)   # E_t[Z] - x_{e_t}
        g -= mean.sum(axis=0)
        if covariance:
            Df = D.reshape(-1, d)
            C += (Pb.reshape(-1, 1) * Df).T @ Df - mean.T @ mean
    return g, 0.5 * (C + C.T)


def conditional_distribution(ctx: LikelihoodContext, t: int, beta) -> np.ndarray:
    """Choice distribution at step ``t`` (``2 <= t <= k``); zero on inactive alternatives."""
    if not 2 <= t <= ctx.k:
        raise ValueError(f"t must lie in 2..{ctx.k}")
    eta = _eta(ctx, beta)
    logits = ctx.logB[t - 2] + eta
    top = logits.max()
    p = np.exp(logits - top)
    return p / p.sum()


def log_likelihood(ctx: LikelihoodContext, beta) -> float:
    eta = _eta(ctx, beta)
    base = -math.log(ctx.n)
    if ctx.k == 1:
        return base
    _, lse = _probabilities(ctx, eta)
    return float(eta[ctx.chosen].sum() + ctx.const_terms.sum() - lse.sum() + base)


def gradient(ctx: LikelihoodContext, beta) -> np.ndarray:
    """``sum_t (x_{e_t} - E_t[Z_t])``."""
    eta = _eta(ctx, beta)
    if ctx.k == 1:
        return np.zeros(ctx.d)
    P, _ = _probabilities(ctx, eta)
    return _moments(ctx, P, ctx.chosen, covariance=False)[0]


def covariance_sum(ctx: LikelihoodContext, beta, burn_in: int = 0) -> np.ndarray:
    """``sum_t Cov_t(Z_t)`` over steps ``t > burn_in + 1``."""
    eta = _eta(ctx, beta)
    if ctx.k == 1 or burn_in >= ctx.k - 1:
        return np.zeros((ctx.d, ctx.d))
    P, _ = _probabilities(ctx, eta)
    return _moments(ctx, P[burn_in:], ctx.chosen[burn_in:])[1]


def hessian(ctx: LikelihoodContext, beta) -> np.ndarray:
    """``-sum_t Cov_t(Z_t)``; symmetric negative semidefinite."""
    return -covariance_sum(ctx, beta)


def _evaluate(ctx: LikelihoodContext, beta):
    eta = _eta(ctx, beta)
    P, lse = _probabilities(ctx, eta)
    ll = float(eta[ctx.chosen].sum() + ctx.const_terms.sum() - lse.sum() - math.log(ctx.n))
    g, C = _moments(ctx, P, ctx.chosen)
    return ll, g, -C


@dataclass
class FitResult:
    beta: np.ndarray
    loglik: float
    grad_norm: float
    iterations: int
    status: str
    hessian: np.ndarray
    certificate: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_dict(self) -> dict:
        out = {
            "beta": [float(b) for b in self.beta],
            "loglik": float(self.loglik),
            "grad_norm": float(self.grad_norm),
            "iterations": int(self.iterations),
            "status": self.status,
            "hessian": [float(h) for h in np.asarray(self.hessian).ravel()],
        }
        if self.certificate is not None:
            out["certificate"] = [float(v) for v in self.certificate]
        return out


def _newton_direction(grad: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Solve ``(-H) step = grad``, adding a ridge only if ``-H`` is not positive definite."""
    A = -H
    d = A.shape[0]
    scale = max(np.trace(A) / d, np.finfo(float).tiny)
    ridge = 0.0
    for _ in range(30):
        try:
            L = np.linalg.cholesky(A + ridge * np.eye(d))
        except np.linalg.LinAlgError:
            ridge = 1e-10 * scale if ridge == 0.0 else ridge * 10.0
            continue
        y = np.linalg.solve(L, grad)
        return np.linalg.solve(L.T, y)
    return grad / scale


def fit_mle(
    ctx: LikelihoodContext,
    init=None,
    tol: float = 1e-8,
    max_iters: int = 200,
    norm_cap: float = 50.0,
    check_existence: bool = False,
    step_tol: float = 1e-6,
) -> FitResult:
    """Maximise the log-likelihood by damped Newton ascent with Armijo backtracking.

    ``Converged`` requires ``||grad||_inf <= tol`` and a Newton step no longer
    than ``step_tol * (1 + ||beta||_inf)``.

    ``Diverged`` means the iterate left the box ``||beta||_inf <= norm_cap``,
    which is how a non-existent maximiser shows up numerically.  With
    ``check_existence`` the exact LP test runs first and a negative answer
    returns ``NonExistent`` with the recession direction as certificate.
    """
    beta = np.zeros(ctx.d) if init is None else np.array(init, dtype=float).reshape(-1)
    if beta.shape[0] != ctx.d:
        raise ValueError(f"init has dimension {beta.shape[0]}, expected {ctx.d}")
    if ctx.k == 1:
        return FitResult(beta, -math.log(ctx.n), 0.0, 0, CONVERGED, np.zeros((ctx.d, ctx.d)))
    if check_existence:
        from .existence import NOT_EXISTS, check_mle_existence

        verdict = check_mle_existence(ctx)
        if verdict.status == NOT_EXISTS:
            ll, g, H = _evaluate(ctx, beta)
            return FitResult(beta, ll, float(np.max(np.abs(g))), 0, NON_EXISTENT, H,
                             certificate=verdict.direction)

    ll, g, H = _evaluate(ctx, beta)
    # size of gradient entries that are pure rounding
    g_noise = 1e-12 * ctx.k * max(1.0, float(np.max(np.abs(ctx.X), initial=0.0)))
    status = MAX_ITERS
    it = 0
    for it in range(max_iters + 1):
        if np.max(np.abs(beta)) > norm_cap:
            status = DIVERGED
            break
        step = _newton_direction(g, H)
        gmax = float(np.max(np.abs(g)))
        # A small gradient alone is not enough: along a recession direction the
        # gradient decays exponentially while Newton steps stay O(1).
        if gmax <= tol and np.max(np.abs(step)) <= step_tol * (1.0 + np.max(np.abs(beta))):
            status = CONVERGED
            break
        if it == max_iters:
            break
        slope = float(g @ step)
        s = 1.0
        accepted = False
        while s > 1e-12:
            cand = beta + s * step
            ll_c = log_likelihood(ctx, cand)
            if ll_c >= ll + 1e-4 * s * slope:
                accepted = True
                break
            if s == 1.0 and slope <= _ROUNDOFF * (1.0 + abs(ll)):
                # predicted gain is below what ll can resolve; judge by the gradient
                ll_c, g_c, H_c = _evaluate(ctx, cand)
                if (np.max(np.abs(g_c)) < max(gmax, g_noise)
                        and ll_c >= ll - 10 * _ROUNDOFF * (1.0 + abs(ll))):
                    beta, ll, g, H = cand, ll_c, g_c, H_c
                    break
            s *= 0.5
        else:
            # no ascent left at machine precision
            break
        if accepted:
            beta = cand
            ll, g, H = _evaluate(ctx, beta)
    return FitResult(beta, ll, float(np.max(np.abs(g))), it, status, H)


# --- source-marginalised (vertex) process ----------------------------------

def vertex_covariates_from_graph(g: Graph) -> np.ndarray:
    """Destination covariates when every edge into ``v`` carries the same row."""
    Xv = np.zeros((g.n, g.d))
    for v in range(g.n):
        inc = g.in_edges[v]
        if inc.size == 0:
            continue
        rows = g.covariates[inc]
        if not np.allclose(rows, rows[0], rtol=0.0, atol=1e-12):
            raise ValueError(f"edge covariates into vertex {v + 1} depend on the source")
        Xv[v] = rows[0]
    return Xv


def vertex_context(g: Graph, vertices, vertex_covariates=None) -> LikelihoodContext:
    """Context for an ordered vertex sequence with source-independent weights.

    Alternative ``v`` at step ``t`` has active count ``sum_{e: dst(e)=v} b_t(src(e))``.
    """
    vertices = np.asarray(vertices, dtype=np.int64).reshape(-1)
    Xv = vertex_covariates_from_graph(g) if vertex_covariates is None else np.asarray(vertex_covariates, float)
    if Xv.ndim == 1:
        Xv = Xv.reshape(-1, 1)
    k = vertices.shape[0]
    if k == 0:
        raise ValueError("empty vertex sequence")
    if np.any((vertices < 0) | (vertices >= g.n)):
        from .errors import InvalidTrace

        raise InvalidTrace("vertex out of range")
    # A[u, v] = number of edges u -> v
    A = np.zeros((g.n, g.n))
    np.add.at(A, (g.src, g.dst), 1.0)
    onehot = np.zeros((max(k - 1, 0), g.n))
    onehot[np.arange(k - 1), vertices[:-1]] = 1.0
    b_vertex = np.cumsum(onehot, axis=0)
    Btilde = b_vertex @ A
    steps = np.arange(k - 1)
    if k > 1 and np.any(Btilde[steps, vertices[1:]] <= 0):
        from .errors import InvalidTrace

        bad = int(np.flatnonzero(Btilde[steps, vertices[1:]] <= 0)[0]) + 2
        raise InvalidTrace(f"step {bad}: vertex has no infected in-neighbour")
    return LikelihoodContext(Xv, Btilde, vertices[1:], g.n)


def vertex_log_likelihood(g: Graph, vertices, beta, vertex_covariates=None) -> float:
    return log_likelihood(vertex_context(g, vertices, vertex_covariates), beta)
