"""Readers and writers for trace, count and result files.

All files use 1-based vertex and edge ids.
"""
from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from .errors import DataError, InvalidTrace
from .graph import Graph
from .simulate import Counts, Trace

_SEED_COMMENT = re.compile(r"#\s*seed_vertex\s*=\s*(\d+)")


def _data_lines(path: Path):
    """Yield ``(lineno, stripped_line)`` for non-empty lines, comments included."""
    with path.open(newline="", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if s:
                yield lineno, s


def _parse_int(cell: str, path, lineno, what):
    try:
        return int(cell)
    except ValueError:
        raise DataError(f"{path}:{lineno}: {what} must be an integer, got {cell!r}") from None


def write_trace(g: Graph, tr: Trace, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "src", "dst", "edge_id"])
        w.writerow([1, "", tr.seed_vertex + 1, ""])
        for i, e in enumerate(tr.events):
            w.writerow([i + 2, int(g.src[e]) + 1, int(g.dst[e]) + 1, int(g.edge_ids[e])])


def read_trace(g: Graph, path) -> Trace:
    """Parse a trace CSV against ``g``.

    Rows must be in time order.  ``edge_id`` may be left empty when the
    ``(src, dst)`` pair identifies a unique edge.
    """
    path = Path(path)
    rows = [(ln, s) for ln, s in _data_lines(path) if not s.startswith("#")]
    if not rows:
        raise DataError(f"{path}: empty trace file")
    header = [h.strip() for h in next(csv.reader([rows[0][1]]))]
    if header != ["t", "src", "dst", "edge_id"]:
        raise DataError(f"{path}:{rows[0][0]}: header must be t,src,dst,edge_id")
    if len(rows) < 2:
        raise DataError(f"{path}: missing seed row")
    pair_index = {}
    for e in range(g.m):
        pair_index.setdefault((int(g.src[e]), int(g.dst[e])), []).append(e)
    id_index = {int(eid): e for e, eid in enumerate(g.edge_ids)}

    seed = None
    events = []
    for pos, (lineno, line) in enumerate(rows[1:]):
        cells = [c.strip() for c in next(csv.reader([line]))]
        if len(cells) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 fields")
        t = _parse_int(cells[0], path, lineno, "t")
        if t != pos + 1:
            raise InvalidTrace(f"{path}:{lineno}: expected t={pos + 1}, got {t}")
        if pos == 0:
            v1 = _parse_int(cells[2], path, lineno, "dst")
            if not 1 <= v1 <= g.n:
                raise InvalidTrace(f"{path}:{lineno}: seed vertex {v1} out of range")
            seed = v1 - 1
            continue
        if cells[3]:
            eid = _parse_int(cells[3], path, lineno, "edge_id")
            if eid not in id_index:
                raise InvalidTrace(f"{path}:{lineno}: unknown edge_id {eid}")
            e = id_index[eid]
            if cells[1] and _parse_int(cells[1], path, lineno, "src") != g.src[e] + 1:
                raise InvalidTrace(f"{path}:{lineno}: src does not match edge {eid}")
            if cells[2] and _parse_int(cells[2], path, lineno, "dst") != g.dst[e] + 1:
                raise InvalidTrace(f"{path}:{lineno}: dst does not match edge {eid}")
        else:
            u = _parse_int(cells[1], path, lineno, "src") - 1
            v = _parse_int(cells[2], path, lineno, "dst") - 1
            hits = pair_index.get((u, v), [])
            if len(hits) != 1:
                raise InvalidTrace(f"{path}:{lineno}: ({u + 1},{v + 1}) does not name a unique edge")
            e = hits[0]
        events.append(e)
    return Trace(seed, np.array(events, dtype=np.int64))


def write_counts(g: Graph, counts: Counts | np.ndarray, path, seed_vertex=None) -> None:
    c = counts.c if isinstance(counts, Counts) else np.asarray(counts)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        if seed_vertex is not None:
            fh.write(f"# seed_vertex={seed_vertex + 1}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["edge_id", "count"])
        for e in range(g.m):
            w.writerow([int(g.edge_ids[e]), int(c[e]) if float(c[e]).is_integer() else float(c[e])])


def read_counts(g: Graph, path):
    """Return ``(c, seed_vertex)``; ``seed_vertex`` is 0-based or ``None``."""
    path = Path(path)
    seed = None
    body = []
    for lineno, s in _data_lines(path):
        if s.startswith("#"):
            mt = _SEED_COMMENT.match(s)
            if mt:
                seed = int(mt.group(1)) - 1
                if not 0 <= seed < g.n:
                    raise DataError(f"{path}:{lineno}: seed vertex out of range")
            continue
        body.append((lineno, s))
    if not body or [h.strip() for h in body[0][1].split(",")] != ["edge_id", "count"]:
        raise DataError(f"{path}: header must be edge_id,count")
    id_index = {int(eid): e for e, eid in enumerate(g.edge_ids)}
    c = np.zeros(g.m)
    seen = set()
    for lineno, s in body[1:]:
        cells = [x.strip() for x in s.split(",")]
        if len(cells) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 fields")
        eid = _parse_int(cells[0], path, lineno, "edge_id")
        if eid not in id_index:
            raise DataError(f"{path}:{lineno}: unknown edge_id {eid}")
        if eid in seen:
            raise DataError(f"{path}:{lineno}: duplicate edge_id {eid}")
        seen.add(eid)
        try:
            val = float(cells[1])
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric count") from None
        if val < 0:
            raise DataError(f"{path}:{lineno}: negative count")
        c[id_index[eid]] = val
    return c, seed


def read_vertex_counts(g: Graph, path) -> np.ndarray:
    """Per-vertex counts from a ``vertex,count`` CSV."""
    path = Path(path)
    body = [(ln, s) for ln, s in _data_lines(path) if not s.startswith("#")]
    if not body or [h.strip() for h in body[0][1].split(",")] != ["vertex", "count"]:
        raise DataError(f"{path}: header must be vertex,count")
    b = np.zeros(g.n)
    for lineno, s in body[1:]:
        cells = [x.strip() for x in s.split(",")]
        v = _parse_int(cells[0], path, lineno, "vertex")
        if not 1 <= v <= g.n:
            raise DataError(f"{path}:{lineno}: vertex {v} out of range")
        try:
            b[v - 1] = float(cells[1])
        except (ValueError, IndexError):
            raise DataError(f"{path}:{lineno}: bad count") from None
    return b


def write_vertex_trace(vertices, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "vertex"])
        for t, v in enumerate(vertices, start=1):
            w.writerow([t, int(v) + 1])


def read_vertex_trace(g: Graph, path) -> np.ndarray:
    path = Path(path)
    body = [(ln, s) for ln, s in _data_lines(path) if not s.startswith("#")]
    if not body or [h.strip() for h in body[0][1].split(",")] != ["t", "vertex"]:
        raise DataError(f"{path}: header must be t,vertex")
    out = []
    for pos, (lineno, s) in enumerate(body[1:], start=1):
        cells = [x.strip() for x in s.split(",")]
        if len(cells) != 2 or _parse_int(cells[0], path, lineno, "t") != pos:
            raise DataError(f"{path}:{lineno}: expected t={pos}")
        v = _parse_int(cells[1], path, lineno, "vertex")
        if not 1 <= v <= g.n:
            raise DataError(f"{path}:{lineno}: vertex {v} out of range")
        out.append(v - 1)
    return np.array(out, dtype=np.int64)


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
