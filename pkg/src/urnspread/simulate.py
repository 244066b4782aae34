"""Simulation of the reinforced edge-transmission process and count bookkeeping.

At step ``t`` edge ``e`` transmits with probability proportional to
``b_t(src(e)) * w(e)``, where ``b_t(v)`` counts the infections of ``v`` before
``t`` (the seed infection counts once).  Sampling is cumulative-sum inversion
over all edges, so a trace of ``k`` steps costs ``O(k m)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidTrace, NotStronglyConnected
from .graph import Graph, edge_weights, strongly_connected


@dataclass(frozen=True, eq=False)
class Trace:
    """Ordered infection record: the seed vertex then the transmitting edges (0-based)."""

    seed_vertex: int
    events: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.events, dtype=np.int64).reshape(-1)
        ev.setflags(write=False)
        object.__setattr__(self, "events", ev)
        object.__setattr__(self, "seed_vertex", int(self.seed_vertex))

    @property
    def k(self) -> int:
        return 1 + int(self.events.shape[0])

    def __eq__(self, other):
        return (isinstance(other, Trace) and self.seed_vertex == other.seed_vertex
                and np.array_equal(self.events, other.events))

    def vertices(self, g: Graph) -> np.ndarray:
        """The infected-vertex sequence ``(v1, ..., vk)``."""
        return np.concatenate([[self.seed_vertex], g.dst[self.events]]).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Counts:
    """``b`` per vertex and ``c`` per edge, as seen just before time ``t``."""

    b: np.ndarray
    c: np.ndarray
    t: int

    def b_edge(self, g: Graph) -> np.ndarray:
        return self.b[g.src]


def make_rng(seed) -> np.random.Generator:
    """The package-wide generator: PCG64 seeded from an integer."""
    return np.random.Generator(np.random.PCG64(seed))


def _check_connected(g: Graph) -> None:
    if not strongly_connected(g):
        raise NotStronglyConnected("the transmission graph is not strongly connected")


def _draw_edges(g: Graph, w: np.ndarray, k: int, rng: np.random.Generator, seed_vertex):
    if seed_vertex is None:
        seed_vertex = int(rng.integers(g.n))
    elif not 0 <= seed_vertex < g.n:
        raise ValueError(f"seed vertex {seed_vertex} out of range")
    events = np.empty(max(k - 1, 0), dtype=np.int64)
    if k <= 1:
        return seed_vertex, events
    uniforms = rng.random(k - 1)
    mass = np.zeros(g.m)
    out = g.out_edges
    mass[out[seed_vertex]] += w[out[seed_vertex]]
    dst = g.dst
    for i in range(k - 1):
        cum = np.cumsum(mass)
        total = cum[-1]
        assert total > 0.0, "no active edge"
        e = int(np.searchsorted(cum, uniforms[i] * total, side="right"))
        if e >= g.m:  # rounding at the top end
            e = int(np.flatnonzero(mass)[-1])
        events[i] = e
        v = dst[e]
        mass[out[v]] += w[out[v]]
    return seed_vertex, events


def simulate_trace(g: Graph, beta, k: int, seed, seed_vertex=None) -> Trace:
    """Simulate ``k`` infection steps with weights ``exp(X beta)``.

    The seed vertex is uniform on the vertex set unless ``seed_vertex`` is given.
    Identical ``(g, beta, k, seed)`` give identical traces.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_connected(g)
    w = edge_weights(g, beta)
    v1, events = _draw_edges(g, w, k, make_rng(seed), seed_vertex)
    return Trace(v1, events)


def simulate_trace_weights(g: Graph, w, k: int, seed, seed_vertex=None) -> Trace:
    """As :func:`simulate_trace` but with an explicit nonnegative weight vector."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_connected(g)
    w = np.asarray(w, dtype=float)
    if w.shape != (g.m,) or np.any(w < 0):
        raise ValueError("weights must be m nonnegative numbers")
    v1, events = _draw_edges(g, w, k, make_rng(seed), seed_vertex)
    return Trace(v1, events)


def simulate_vertex_trace(g: Graph, beta, k: int, seed, seed_vertex=None) -> np.ndarray:
    """Simulate the infected-vertex sequence with the source marginalised out.

    Vertex ``v`` is infected with probability proportional to
    ``sum_{e: dst(e)=v} b_t(src(e)) w(e)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    _check_connected(g)
    w = edge_weights(g, beta)
    rng = make_rng(seed)
    if seed_vertex is None:
        seed_vertex = int(rng.integers(g.n))
    out = np.zeros(k, dtype=np.int64)
    out[0] = seed_vertex
    if k == 1:
        return out
    uniforms = rng.random(k - 1)
    # mass[v] = sum over edges into v of b(src) w(e)
    mass = np.zeros(g.n)
    np.add.at(mass, g.dst[g.out_edges[seed_vertex]], w[g.out_edges[seed_vertex]])
    for i in range(k - 1):
        cum = np.cumsum(mass)
        total = cum[-1]
        assert total > 0.0, "no reachable vertex"
        v = int(np.searchsorted(cum, uniforms[i] * total, side="right"))
        if v >= g.n:
            v = int(np.flatnonzero(mass)[-1])
        out[i + 1] = v
        oe = g.out_edges[v]
        np.add.at(mass, g.dst[oe], w[oe])
    return out


def counts_from_trace(g: Graph, tr: Trace) -> Counts:
    """Replay ``tr`` and return ``b_{k+1}`` (per vertex) and ``c_{k+1}`` (per edge)."""
    b = np.zeros(g.n, dtype=np.int64)
    c = np.zeros(g.m, dtype=np.int64)
    if not 0 <= tr.seed_vertex < g.n:
        raise InvalidTrace(f"seed vertex {tr.seed_vertex + 1} out of range")
    b[tr.seed_vertex] = 1
    for i, e in enumerate(tr.events):
        if not 0 <= e < g.m:
            raise InvalidTrace(f"step {i + 2}: unknown edge index {e}")
        if b[g.src[e]] == 0:
            raise InvalidTrace(
                f"step {i + 2}: edge {int(g.edge_ids[e])} leaves vertex {g.src[e] + 1}, not yet infected"
            )
        c[e] += 1
        b[g.dst[e]] += 1
    return Counts(b, c, tr.k + 1)


def active_counts(g: Graph, tr: Trace) -> np.ndarray:
    """Row ``i`` holds ``b_t(e)`` over edges at step ``t = i + 2`` (shape ``(k-1, m)``).

    Validates the trace like :func:`counts_from_trace`.
    """
    counts_from_trace(g, tr)  # validation
    vertices = tr.vertices(g)
    k = tr.k
    if k == 1:
        return np.zeros((0, g.m))
    # b_t(v) for t = 2..k: cumulative infections among v_1..v_{t-1}
    onehot = np.zeros((k - 1, g.n))
    onehot[np.arange(k - 1), vertices[:-1]] = 1.0
    b_vertex = np.cumsum(onehot, axis=0)
    return b_vertex[:, g.src]
