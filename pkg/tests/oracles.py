"""Independent reference computations used by the tests.

These deliberately avoid the package's vectorised code paths: plain loops,
``math`` functions, finite differences, grid search and library eigensolvers.
"""
import math

import numpy as np


def loglik_loop(g, seed_vertex, events, beta):
    """Replay the trace step by step and sum log transition probabilities."""
    beta = [float(b) for b in np.ravel(beta)]
    b = [0] * g.n
    b[seed_vertex] = 1
    total = -math.log(g.n)
    for e in events:
        num = None
        den = 0.0
        for f in range(g.m):
            bf = b[int(g.src[f])]
            if bf == 0:
                continue
            wf = math.exp(sum(x * bb for x, bb in zip(g.covariates[f], beta)))
            den += bf * wf
            if f == e:
                num = bf * wf
        total += math.log(num / den)
        b[int(g.dst[e])] += 1
    return total


def fd_gradient(f, beta, h=1e-5):
    beta = np.asarray(beta, dtype=float)
    out = np.zeros_like(beta)
    for a in range(beta.size):
        e = np.zeros_like(beta)
        e[a] = h
        out[a] = (f(beta + e) - f(beta - e)) / (2 * h)
    return out


def fd_jacobian(grad, beta, h=1e-5):
    beta = np.asarray(beta, dtype=float)
    cols = []
    for a in range(beta.size):
        e = np.zeros_like(beta)
        e[a] = h
        cols.append((grad(beta + e) - grad(beta - e)) / (2 * h))
    return np.column_stack(cols)


def grid_argmax(f, lo, hi, step):
    grid = np.arange(lo, hi + step / 2, step)
    vals = np.array([f(x) for x in grid])
    return float(grid[int(np.argmax(vals))])


def perron_by_eig(W):
    """Leading left eigenpair from a dense eigensolver, normalised to sum 1."""
    vals, vecs = np.linalg.eig(np.asarray(W, dtype=float).T)
    i = int(np.argmax(vals.real))
    v = np.abs(vecs[:, i].real)
    return v / v.sum(), float(vals[i].real)


def random_instance(rng, n_max=10, d_max=3, k_max=50):
    """A random strongly connected graph with a simulated trace."""
    from urnspread.graph import Graph, strongly_connected
    from urnspread.simulate import simulate_trace

    while True:
        n = int(rng.integers(2, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        src = list(range(n))
        dst = [(i + 1) % n for i in range(n)]
        extra = int(rng.integers(0, 2 * n))
        src += list(rng.integers(0, n, size=extra))
        dst += list(rng.integers(0, n, size=extra))
        X = rng.normal(size=(len(src), d))
        g = Graph(n, src, dst, X)
        if strongly_connected(g):
            break
    beta = rng.normal(size=d)
    k = int(rng.integers(2, k_max + 1))
    tr = simulate_trace(g, beta, k, seed=int(rng.integers(2**31)))
    return g, tr, rng.normal(size=d)
