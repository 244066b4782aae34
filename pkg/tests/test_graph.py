import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_instance
from urnspread.errors import DuplicateEdgeId, GraphFormatError
from urnspread.graph import (Graph, complete_graph, cycle_graph, cycle_with_loops_graph, edge_weights,
                             load_graph, replacement_matrix, strongly_connected, write_graph)


def _write(tmp_path, text, name="g.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_two_cycle(tmp_path):
    g = load_graph(_write(tmp_path, "edge_id,src,dst,x1\n1,1,2,1.0\n2,2,1,0.0\n"))
    assert (g.n, g.m, g.d) == (2, 2, 1)
    assert list(g.src) == [0, 1] and list(g.dst) == [1, 0]
    np.testing.assert_array_equal(g.covariates, [[1.0], [0.0]])


def test_load_three_cycle_two_covariates(tmp_path):
    g = load_graph(_write(tmp_path, "edge_id,src,dst,x1,x2\n1,1,2,0,1\n2,2,3,1,0\n3,3,1,2,2\n"))
    assert g.m == 3 and g.covariates.shape == (3, 2)


def test_duplicate_edge_id(tmp_path):
    with pytest.raises(DuplicateEdgeId, match=":3"):
        load_graph(_write(tmp_path, "edge_id,src,dst,x1\n1,1,2,1\n1,2,1,0\n"))


@pytest.mark.parametrize("body, match", [
    ("1,1,2,abc\n2,2,1,0\n", "non-numeric"),
    ("1,1,2\n2,2,1,0\n", "expected 4 fields"),
    ("1,0,2,1\n2,2,1,0\n", "out of range"),
    ("1,1,2,1\n3,2,1,0\n", "exactly 1..2"),
])
def test_malformed_rows(tmp_path, body, match):
    with pytest.raises(GraphFormatError, match=match):
        load_graph(_write(tmp_path, "edge_id,src,dst,x1\n" + body))


def test_declared_vertex_count(tmp_path):
    g = load_graph(_write(tmp_path, "# n=3\nedge_id,src,dst,x1\n1,1,2,1\n2,2,1,0\n"))
    assert g.n == 3
    assert not strongly_connected(g)


def test_write_roundtrip(tmp_path, loop_triangle):
    p = tmp_path / "out.csv"
    write_graph(loop_triangle, p)
    g = load_graph(p)
    np.testing.assert_array_equal(g.src, loop_triangle.src)
    np.testing.assert_array_equal(g.dst, loop_triangle.dst)
    np.testing.assert_array_equal(g.covariates, loop_triangle.covariates)


def test_arrays_are_read_only(two_cycle):
    with pytest.raises(ValueError):
        two_cycle.src[0] = 1


def test_strongly_connected_cases():
    assert strongly_connected(cycle_graph(2, np.zeros((2, 1))))
    assert not strongly_connected(Graph(2, [0], [1], [[0.0]]))
    for n in (1, 3, 17):
        assert strongly_connected(cycle_graph(n, np.zeros((n, 1))))


def test_strongly_connected_against_scipy():
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(1, 12))
        src, dst = rng.integers(0, n, m), rng.integers(0, n, m)
        g = Graph(n, src, dst, np.zeros((m, 1)))
        A = csr_matrix((np.ones(m), (src, dst)), shape=(n, n))
        ncomp, _ = connected_components(A, directed=True, connection="strong")
        assert strongly_connected(g) == (ncomp == 1)


def test_edge_weights_examples(two_cycle):
    np.testing.assert_array_equal(edge_weights(two_cycle, [0.0]), [1.0, 1.0])
    w = edge_weights(two_cycle, [0.5])
    assert w[0] == pytest.approx(1.64872, abs=1e-5) and w[1] == 1.0


def test_edge_weights_errors(two_cycle):
    with pytest.raises(ValueError):
        edge_weights(two_cycle, [1.0, 2.0])
    with pytest.raises(OverflowError):
        edge_weights(two_cycle, [800.0])


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_edge_weights_shift(c, beta):
    X = np.array([[0.1, 0.2, -0.3], [1.0, 0.0, 0.5], [0.0, -1.0, 0.2]])
    g = cycle_graph(3, X)
    # append a constant covariate carrying the shift
    g1 = cycle_graph(3, np.column_stack([X, np.ones(3)]))
    w = edge_weights(g, beta)
    ws = edge_weights(g1, list(beta) + [c])
    np.testing.assert_allclose(ws, w * math.exp(c), rtol=1e-12)


def test_replacement_matrix_examples(two_cycle):
    np.testing.assert_array_equal(replacement_matrix(two_cycle, [1.0, 1.0]), [[0, 1], [1, 0]])
    g3 = cycle_graph(3, np.zeros((3, 1)))
    W = replacement_matrix(g3, [4 / 3, 3 / 4, 1.0])
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 2], expected[2, 0] = 3 / 4, 1.0, 4 / 3
    np.testing.assert_allclose(W, expected)
    g = Graph(2, [0, 0, 1], [0, 1, 0], np.zeros((3, 1)))
    W = replacement_matrix(g, [1.0, 2.0, 3.0])
    assert W[0, 0] > 0 and W[0, 1] > 0 and W[0, 2] == 0


def test_replacement_matrix_loop_rule(loop_triangle):
    w = np.arange(1.0, 7.0)
    W = replacement_matrix(loop_triangle, w)
    for e in range(loop_triangle.m):
        for f in range(loop_triangle.m):
            want = w[f] if loop_triangle.dst[e] == loop_triangle.src[f] else 0.0
            assert W[e, f] == want


def test_builders():
    g = cycle_with_loops_graph(4, np.ones((4, 2)))
    assert g.m == 8 and g.d == 3
    np.testing.assert_array_equal(g.covariates[4:], np.tile([0, 0, 1], (4, 1)))
    np.testing.assert_array_equal(g.src[4:], g.dst[4:])
    c = complete_graph(3, np.zeros((9, 1)))
    assert [(int(u), int(v)) for u, v in zip(c.src, c.dst)][:4] == [(0, 0), (0, 1), (0, 2), (1, 0)]
    assert complete_graph(3, np.zeros((6, 1)), loops=False).m == 6


def test_subgraph_keeps_ids(loop_triangle):
    s = loop_triangle.subgraph([1, 4])
    assert list(s.edge_ids) == [2, 5] and s.n == 3


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000))
def test_weights_positive_and_pattern_fixed(seed):
    rng = np.random.default_rng(seed)
    g, _, _ = random_instance(rng, k_max=2)
    bound = 699.0 / max(np.max(np.abs(g.covariates)), 1e-12)
    beta = rng.uniform(-1, 1, g.d) * bound / g.d
    w = edge_weights(g, beta)
    assert np.all(w > 0) and np.all(np.isfinite(w))
    pattern = replacement_matrix(g, w) > 0
    np.testing.assert_array_equal(pattern, replacement_matrix(g, rng.uniform(0.1, 5, g.m)) > 0)
    np.testing.assert_array_equal(pattern, g.dst[:, None] == g.src[None, :])


def test_strong_connectivity_means_irreducible():
    rng = np.random.default_rng(13)
    for _ in range(200):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, 9))
        g = Graph(n, rng.integers(0, n, m), rng.integers(0, n, m), np.zeros((m, 1)))
        W = replacement_matrix(g, np.ones(m))
        positive = np.all(np.linalg.matrix_power(np.eye(m) + W, m) > 0)
        if strongly_connected(g):
            assert positive
