import numpy as np
import pytest

from urnspread import io
from urnspread.errors import DataError, InvalidTrace
from urnspread.graph import Graph
from urnspread.simulate import Trace, counts_from_trace, simulate_trace, simulate_vertex_trace


def test_trace_roundtrip(tmp_path, loop_triangle):
    tr = simulate_trace(loop_triangle, [0.2, -0.4], 40, seed=0)
    p = tmp_path / "trace.csv"
    io.write_trace(loop_triangle, tr, p)
    assert io.read_trace(loop_triangle, p) == tr


def test_seed_only_trace(tmp_path, two_cycle):
    p = tmp_path / "t.csv"
    io.write_trace(two_cycle, Trace(1, []), p)
    assert p.read_text() == "t,src,dst,edge_id\n1,,2,\n"
    assert io.read_trace(two_cycle, p) == Trace(1, [])


def test_trace_by_pair(tmp_path, two_cycle):
    p = tmp_path / "t.csv"
    p.write_text("t,src,dst,edge_id\n1,,1,\n2,1,2,\n3,2,1,\n")
    assert io.read_trace(two_cycle, p) == Trace(0, [0, 1])


def test_ambiguous_pair_needs_edge_id(tmp_path):
    g = Graph(2, [0, 0, 1], [1, 1, 0], np.zeros((3, 1)))
    p = tmp_path / "t.csv"
    p.write_text("t,src,dst,edge_id\n1,,1,\n2,1,2,\n")
    with pytest.raises(InvalidTrace, match=":3:"):
        io.read_trace(g, p)
    p.write_text("t,src,dst,edge_id\n1,,1,\n2,1,2,2\n")
    assert io.read_trace(g, p) == Trace(0, [1])


@pytest.mark.parametrize("body, match", [
    ("t,src,dst\n1,,1\n", "header"),
    ("t,src,dst,edge_id\n1,,1,\n3,1,2,1\n", ":3: expected t=2"),
    ("t,src,dst,edge_id\n1,,1,\n2,1,2,9\n", "unknown edge_id"),
    ("t,src,dst,edge_id\n1,,1,\n2,2,1,1\n", "src does not match"),
    ("t,src,dst,edge_id\n1,,5,\n", "out of range"),
    ("t,src,dst,edge_id\n1,,1,\nx,1,2,\n", "integer"),
])
def test_trace_format_errors(tmp_path, two_cycle, body, match):
    p = tmp_path / "t.csv"
    p.write_text(body)
    with pytest.raises(DataError, match=match):
        io.read_trace(two_cycle, p)


def test_counts_roundtrip(tmp_path, loop_triangle):
    tr = simulate_trace(loop_triangle, [0.0, 0.0], 25, seed=2)
    counts = counts_from_trace(loop_triangle, tr)
    p = tmp_path / "c.csv"
    io.write_counts(loop_triangle, counts, p, seed_vertex=tr.seed_vertex)
    c, seed = io.read_counts(loop_triangle, p)
    np.testing.assert_array_equal(c, counts.c)
    assert seed == tr.seed_vertex


@pytest.mark.parametrize("body, match", [
    ("edge_id,count\n1,-1\n", "negative"),
    ("edge_id,count\n1,2\n1,3\n", "duplicate"),
    ("edge_id,count\n7,2\n", "unknown edge_id"),
    ("id,count\n1,2\n", "header"),
])
def test_counts_errors(tmp_path, two_cycle, body, match):
    p = tmp_path / "c.csv"
    p.write_text(body)
    with pytest.raises(DataError, match=match):
        io.read_counts(two_cycle, p)


def test_vertex_counts_and_vertex_trace(tmp_path, loop_triangle):
    p = tmp_path / "b.csv"
    p.write_text("vertex,count\n1,3\n3,2\n")
    np.testing.assert_array_equal(io.read_vertex_counts(loop_triangle, p), [3, 0, 2])
    v = simulate_vertex_trace(loop_triangle, [0.1, 0.1], 20, seed=1)
    q = tmp_path / "v.csv"
    io.write_vertex_trace(v, q)
    np.testing.assert_array_equal(io.read_vertex_trace(loop_triangle, q), v)
