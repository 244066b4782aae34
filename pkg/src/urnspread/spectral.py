"""Perron left eigenvector of the urn matrix and the limiting count proportions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotConverged, NotStronglyConnected
from .graph import Graph, edge_weights, replacement_matrix, strongly_connected


@dataclass(frozen=True)
class SpectralResult:
    pi: np.ndarray
    eigenvalue: float
    residual: float
    iterations: int


def leading_left_eigenvector(W, tol: float = 1e-12, max_iters: int = 100_000) -> SpectralResult:
    """Power iteration for ``pi^T W = lambda pi^T`` with ``pi`` a probability vector.

    Iterates on ``(W + I)^T`` so that periodic matrices (pure cycles) converge;
    the shift leaves eigenvectors alone and is removed from the eigenvalue.
    Starts at the uniform vector and stops when successive iterates differ by
    less than ``tol`` in L1.
    """
    W = np.asarray(W, dtype=float)
    m = W.shape[0]
    if W.shape != (m, m):
        raise ValueError("W must be square")
    if np.any(W < 0):
        raise ValueError("W must be nonnegative")
    x = np.full(m, 1.0 / m)
    for it in range(1, max_iters + 1):
        y = x @ W + x
        s = y.sum()
        if not np.isfinite(s) or s <= 0.0:
            raise NotConverged("power iteration collapsed to zero")
        y /= s
        delta = np.abs(y - x).sum()
        x = y
        if delta < tol:
            break
    else:
        raise NotConverged(f"power iteration did not converge in {max_iters} iterations (delta={delta:.3e})")
    xW = x @ W
    lam = float(xW @ x / (x @ x))
    residual = float(np.max(np.abs(xW - lam * x)))
    return SpectralResult(x, lam, residual, it)


def limiting_edge_distribution(g: Graph, beta, tol: float = 1e-12, max_iters: int = 100_000) -> SpectralResult:
    """Limiting transmission distribution over edges for parameter ``beta``."""
    if not strongly_connected(g):
        raise NotStronglyConnected("limiting distribution needs a strongly connected graph")
    W = replacement_matrix(g, edge_weights(g, beta))
    return leading_left_eigenvector(W, tol=tol, max_iters=max_iters)


def b_infinity_from_pi(pi, w) -> np.ndarray:
    """Normalised limiting ball counts ``b`` with ``(b * w) / (b . w) == pi``."""
    pi = np.asarray(pi, dtype=float)
    w = np.asarray(w, dtype=float)
    if pi.shape != w.shape:
        raise ValueError("pi and w must have the same length")
    if np.any((w <= 0) & (pi > 0)):
        raise ValueError("zero weight on an edge with positive limiting mass")
    b = np.divide(pi, w, out=np.zeros_like(pi), where=w > 0)
    return b / b.sum()


def pi_from_b_infinity(b, w) -> np.ndarray:
    bw = np.asarray(b, dtype=float) * np.asarray(w, dtype=float)
    return bw / bw.sum()
