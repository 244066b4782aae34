"""Weight estimation from unordered transmission counts.

Two estimators share the map ``f(v, b) = (v / b) / ||v / b||_1``: the
empirical one applies it once to the observed transmission proportions, the
fixed-point one alternates it with the Perron eigenvector of the urn matrix.
Both work on the subgraph of edges that transmitted at least once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyCounts, InconsistentCounts, NoPerronVector, NotConverged
from .graph import Graph, cycle_graph, replacement_matrix, strongly_connected
from .spectral import leading_left_eigenvector


@dataclass(frozen=True, eq=False)
class UnorderedData:
    """Per-edge transmission counts ``c`` and per-vertex infection counts ``b``."""

    c: np.ndarray
    b: np.ndarray
    seed_vertex: int | None = None

    @classmethod
    def from_counts(cls, g: Graph, c, seed_vertex=None, b=None) -> "UnorderedData":
        """Reconstruct ``b(v) = [v == seed] + sum_{dst(e)=v} c(e)`` unless ``b`` is given."""
        c = np.asarray(c, dtype=float).reshape(-1)
        if c.shape[0] != g.m:
            raise ValueError(f"expected {g.m} edge counts, got {c.shape[0]}")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        if b is None:
            if seed_vertex is None:
                raise ValueError("vertex counts b are required when the seed vertex is unknown")
            b = np.zeros(g.n)
            b[seed_vertex] = 1.0
            np.add.at(b, g.dst, c)
        else:
            b = np.asarray(b, dtype=float).reshape(-1)
            if b.shape[0] != g.n or np.any(b < 0):
                raise ValueError("b must hold n nonnegative vertex counts")
        return cls(c, b, seed_vertex)

    @classmethod
    def from_trace(cls, g: Graph, tr) -> "UnorderedData":
        from .simulate import counts_from_trace

        counts = counts_from_trace(g, tr)
        return cls(counts.c.astype(float), counts.b.astype(float), tr.seed_vertex)


def normalized_ratio(v, b) -> np.ndarray:
    """``(v / b) / ||v / b||_1`` with zeros wherever ``v`` is zero."""
    v = np.asarray(v, dtype=float)
    b = np.asarray(b, dtype=float)
    r = np.divide(v, b, out=np.zeros_like(v), where=v > 0)
    return r / r.sum()


def _support(g: Graph, data: UnorderedData) -> tuple[np.ndarray, np.ndarray]:
    total = data.c.sum()
    if total <= 0:
        raise EmptyCounts("no transmissions recorded")
    support = np.flatnonzero(data.c > 0)
    b_edge = data.b[g.src]
    if np.any(b_edge[support] <= 0):
        bad = support[b_edge[support] <= 0][0]
        raise InconsistentCounts(
            f"edge {int(g.edge_ids[bad])} transmitted but its source has zero infection count"
        )
    return support, b_edge


def empirical_weight_estimate(g: Graph, data: UnorderedData) -> np.ndarray:
    """Weights from the empirical transmission distribution; zero off the support."""
    support, b_edge = _support(g, data)
    w = np.zeros(g.m)
    w[support] = normalized_ratio(data.c[support] / data.c.sum(), b_edge[support])
    return w


def support_graph(g: Graph, edges) -> Graph:
    """Subgraph on ``edges`` with vertices relabelled to those the edges touch."""
    edges = np.asarray(edges, dtype=np.int64)
    verts = np.unique(np.concatenate([g.src[edges], g.dst[edges]]))
    relabel = -np.ones(g.n, dtype=np.int64)
    relabel[verts] = np.arange(verts.size)
    return Graph(verts.size, relabel[g.src[edges]], relabel[g.dst[edges]],
                 g.covariates[edges], edge_ids=g.edge_ids[edges])


def fixed_point_estimate(g: Graph, data: UnorderedData, v0=None, T: int = 5,
                         tol: float = 1e-12, max_iters: int = 100_000) -> np.ndarray:
    """Iterate weights -> urn matrix -> Perron vector ``T`` times and return the weights.

    Raises :class:`NoPerronVector` when the transmitting subgraph is not
    strongly connected or the power iteration fails.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    support, b_edge = _support(g, data)
    sub = support_graph(g, support)
    if not strongly_connected(sub):
        raise NoPerronVector("edges with positive counts do not form a strongly connected subgraph")
    bs = b_edge[support]
    if v0 is None:
        v = data.c[support] / data.c[support].sum()
    else:
        v0 = np.asarray(v0, dtype=float).reshape(-1)
        v = v0[support] if v0.shape[0] == g.m else v0
        if v.shape[0] != support.size or np.any(v <= 0):
            raise ValueError("v0 must be positive on the support")
        v = v / v.sum()
    for _ in range(T):
        w_i = normalized_ratio(v, bs)
        try:
            v = leading_left_eigenvector(replacement_matrix(sub, w_i), tol=tol, max_iters=max_iters).pi
        except NotConverged as exc:
            raise NoPerronVector(str(exc)) from exc
    out = np.zeros(g.m)
    out[support] = normalized_ratio(v, bs)
    return out


@dataclass(frozen=True)
class CyclicOracle:
    weights: np.ndarray
    pi: np.ndarray
    shifted_counts: np.ndarray
    fixed_point_residual: float
    perron_residual: float
    eigenvalue: float


def cyclic_fixed_point_oracle(n: int, c, b2) -> CyclicOracle:
    """Closed-form fixed point for a directed ``n``-cycle.

    Edge ``i`` runs ``i -> i+1``.  With ``b''`` the vertex counts minus the
    initial ball, ``b''(i+1) = c(i)`` and the weights are
    ``w(i) = b''(i+1) / b''(i)``.  The returned residuals check that
    ``pi = c / ||c||_1`` solves both the weight equation and ``pi^T W = pi^T``;
    the eigenvalue is ``(prod w)^(1/n)``, the positive root of ``l^n - prod w``.
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    b2 = np.asarray(b2, dtype=float).reshape(-1)
    if c.shape[0] != n or b2.shape[0] != n:
        raise ValueError("need n counts and n initial ball counts")
    if np.any(b2 < 0) or b2.sum() <= 0:
        raise ValueError("initial ball vector must be nonnegative and nonzero")
    b_final = b2 + np.roll(c, 1)
    shifted = b_final - b2
    if np.any(shifted <= 0):
        raise ValueError("zero entry in the shifted counts")
    w = np.roll(shifted, -1) / shifted
    pi = c / c.sum()
    bw = shifted * w
    fp_res = float(np.max(np.abs(pi - bw / bw.sum())))
    W = replacement_matrix(cycle_graph(n, np.zeros((n, 1))), w)
    perron_res = float(np.max(np.abs(pi @ W - pi)))
    lam = float(np.exp(np.mean(np.log(w))))
    return CyclicOracle(w, pi, shifted, fp_res, perron_res, lam)
