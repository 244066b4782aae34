"""Directed multigraphs with edge covariates, exponential edge weights and the urn matrix.

Vertices and edges are 0-based internally.  Files and the CLI use 1-based ids;
conversion happens only in the IO layer (``load_graph`` / ``write_graph``).
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DuplicateEdgeId, GraphFormatError

# exp(700) is still finite in IEEE double; exp(710) is not.
MAX_EXPONENT = 700.0

_N_COMMENT = re.compile(r"#\s*n\s*=\s*(\d+)")


@dataclass(frozen=True, eq=False)
class Graph:
    """Directed multigraph with one covariate row per edge.

    ``src[e]``/``dst[e]`` are 0-based vertex indices of edge ``e``;
    ``covariates`` is the ``m x d`` matrix whose row ``e`` is ``x_e``.
    Self-loops and parallel edges are allowed.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    covariates: np.ndarray
    edge_ids: np.ndarray = field(default=None)
    out_edges: tuple = field(init=False, repr=False)
    in_edges: tuple = field(init=False, repr=False)

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64).reshape(-1)
        dst = np.asarray(self.dst, dtype=np.int64).reshape(-1)
        X = np.asarray(self.covariates, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        m = src.shape[0]
        if dst.shape[0] != m or X.shape[0] != m:
            raise GraphFormatError(
                f"src/dst/covariates disagree on edge count: {m}, {dst.shape[0]}, {X.shape[0]}"
            )
        if self.n < 1:
            raise GraphFormatError("graph needs at least one vertex")
        if m and (src.min() < 0 or dst.min() < 0 or src.max() >= self.n or dst.max() >= self.n):
            raise GraphFormatError(f"vertex index out of range for n={self.n}")
        if not np.all(np.isfinite(X)):
            raise GraphFormatError("covariates must be finite")
        ids = np.arange(1, m + 1) if self.edge_ids is None else np.asarray(self.edge_ids, dtype=np.int64)
        for arr in (src, dst, X, ids):
            arr.setflags(write=False)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "covariates", X)
        object.__setattr__(self, "edge_ids", ids)
        out = [[] for _ in range(self.n)]
        inc = [[] for _ in range(self.n)]
        for e in range(m):
            out[src[e]].append(e)
            inc[dst[e]].append(e)
        object.__setattr__(self, "out_edges", tuple(np.array(o, dtype=np.int64) for o in out))
        object.__setattr__(self, "in_edges", tuple(np.array(i, dtype=np.int64) for i in inc))

    @property
    def m(self) -> int:
        return int(self.src.shape[0])

    @property
    def d(self) -> int:
        return int(self.covariates.shape[1])

    def edge_index(self, edge_id: int) -> int:
        """Map a 1-based file edge id to its 0-based position."""
        hits = np.flatnonzero(self.edge_ids == edge_id)
        if hits.size != 1:
            raise KeyError(edge_id)
        return int(hits[0])

    def with_covariates(self, X) -> "Graph":
        return Graph(self.n, self.src, self.dst, X, edge_ids=self.edge_ids)

    def subgraph(self, edges) -> "Graph":
        """Graph on the same vertex set keeping only ``edges`` (in the given order)."""
        edges = np.asarray(edges, dtype=np.int64)
        return Graph(self.n, self.src[edges], self.dst[edges], self.covariates[edges],
                     edge_ids=self.edge_ids[edges])


# --- builders -------------------------------------------------------------

def cycle_graph(n: int, covariates) -> Graph:
    """Directed cycle 1 -> 2 -> ... -> n -> 1; edge i leaves vertex i."""
    idx = np.arange(n)
    return Graph(n, idx, (idx + 1) % n, covariates)


def cycle_with_loops_graph(n: int, cycle_covariates) -> Graph:
    """Directed cycle plus a self-loop at each vertex.

    The ``n`` cycle edges come first, then the ``n`` loops.  Cycle edges get
    ``[x, 0]`` and loops the standard basis vector ``e_{d+1}``.
    """
    Xc = np.asarray(cycle_covariates, dtype=float).reshape(n, -1)
    d = Xc.shape[1]
    X = np.zeros((2 * n, d + 1))
    X[:n, :d] = Xc
    X[n:, d] = 1.0
    idx = np.arange(n)
    return Graph(n, np.concatenate([idx, idx]), np.concatenate([(idx + 1) % n, idx]), X)


def complete_graph(n: int, covariates, loops: bool = True) -> Graph:
    """Complete digraph, edges ordered by (src, dst) lexicographically."""
    pairs = [(u, v) for u in range(n) for v in range(n) if loops or u != v]
    src = [p[0] for p in pairs]
    dst = [p[1] for p in pairs]
    return Graph(n, src, dst, covariates)


# --- IO --------------------------------------------------------------------

def load_graph(path) -> Graph:
    """Read the graph CSV (``edge_id,src,dst,x1,...,xd``, 1-based ids).

    An optional ``# n=<count>`` comment fixes the vertex count; otherwise it is
    the largest vertex id seen.
    """
    path = Path(path)
    n_declared = None
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        lines = []
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                mt = _N_COMMENT.match(stripped)
                if mt:
                    n_declared = int(mt.group(1))
                continue
            lines.append((lineno, line))
    if not lines:
        raise GraphFormatError(f"{path}: empty graph file")
    header = next(csv.reader([lines[0][1]]))
    header = [h.strip() for h in header]
    if header[:3] != ["edge_id", "src", "dst"]:
        raise GraphFormatError(f"{path}:{lines[0][0]}: header must start with edge_id,src,dst")
    d = len(header) - 3
    for lineno, line in lines[1:]:
        cells = [c.strip() for c in next(csv.reader([line]))]
        if len(cells) != 3 + d:
            raise GraphFormatError(f"{path}:{lineno}: expected {3 + d} fields, got {len(cells)}")
        try:
            eid, u, v = int(cells[0]), int(cells[1]), int(cells[2])
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: edge_id/src/dst must be integers") from None
        try:
            x = [float(c) for c in cells[3:]]
        except ValueError:
            raise GraphFormatError(f"{path}:{lineno}: non-numeric covariate") from None
        rows.append((lineno, eid, u, v, x))
    if not rows:
        raise GraphFormatError(f"{path}: no edges")

    seen = {}
    for lineno, eid, *_ in rows:
        if eid in seen:
            raise DuplicateEdgeId(f"{path}:{lineno}: edge_id {eid} already used on line {seen[eid]}")
        seen[eid] = lineno
    m = len(rows)
    if set(seen) != set(range(1, m + 1)):
        raise GraphFormatError(f"{path}: edge ids must be exactly 1..{m}")

    max_vertex = max(max(r[2], r[3]) for r in rows)
    n = n_declared if n_declared is not None else max_vertex
    for lineno, eid, u, v, _ in rows:
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"{path}:{lineno}: vertex id out of range 1..{n}")
    X = np.array([r[4] for r in rows], dtype=float).reshape(m, d)
    return Graph(
        n,
        [r[2] - 1 for r in rows],
        [r[3] - 1 for r in rows],
        X,
        edge_ids=[r[1] for r in rows],
    )


def write_graph(g: Graph, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# n={g.n}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["edge_id", "src", "dst"] + [f"x{j + 1}" for j in range(g.d)])
        for e in range(g.m):
            w.writerow([int(g.edge_ids[e]), int(g.src[e]) + 1, int(g.dst[e]) + 1]
                       + [repr(float(x)) for x in g.covariates[e]])


# --- structure ------------------------------------------------------------

def _reaches_all(n: int, adjacency, start: int) -> bool:
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return bool(seen.all())


def strongly_connected(g: Graph) -> bool:
    """True iff every vertex reaches every other along directed edges.

    Two passes: forward reachability from vertex 0 and reachability in the
    reversed graph.
    """
    if g.n == 1:
        return True
    fwd = [g.dst[o] for o in g.out_edges]
    rev = [g.src[i] for i in g.in_edges]
    return _reaches_all(g.n, fwd, 0) and _reaches_all(g.n, rev, 0)


def edge_weights(g: Graph, beta) -> np.ndarray:
    """``w(e) = exp(x_e . beta)`` for every edge."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.shape[0] != g.d:
        raise ValueError(f"beta has dimension {beta.shape[0]}, graph has d={g.d}")
    eta = g.covariates @ beta
    if not np.all(np.isfinite(eta)) or np.max(np.abs(eta), initial=0.0) > MAX_EXPONENT:
        raise OverflowError(f"edge exponent outside +-{MAX_EXPONENT}")
    return np.exp(eta)


def replacement_matrix(g: Graph, w) -> np.ndarray:
    """Urn replacement matrix with ``W[e, f] = w(f)`` whenever ``dst(e) == src(f)``."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape[0] != g.m:
        raise ValueError(f"weight vector has {w.shape[0]} entries, graph has m={g.m}")
    follows = g.dst[:, None] == g.src[None, :]
    return np.where(follows, w[None, :], 0.0)
