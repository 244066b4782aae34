"""Turn region-level transmission records into a complete-graph data set.

Inputs:

* transmissions CSV ``t,src_region,dst_region`` (rows in any order, sorted by ``t``);
* region covariates CSV ``region,<name1>,<name2>,...`` (one row per region;
  row order fixes vertex order);
* optionally a pair covariates CSV ``src_region,dst_region,<name>,...``.

Each region covariate ``c`` yields two edge columns, ``src_c`` and ``dst_c``.
Columns listed in ``log_columns`` are log-transformed (values must be
positive), then every column is standardised to mean 0 and unit population
standard deviation over the edges.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, InvalidTrace
from .graph import Graph, complete_graph
from .simulate import Trace, counts_from_trace
from .unordered import UnorderedData


@dataclass
class IngestedData:
    graph: Graph
    regions: list
    covariate_names: list
    trace: Trace | None
    unordered: UnorderedData | None


def _read_table(path: Path):
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1)
                if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0][1]]
    return header, [(i, [c.strip() for c in r]) for i, r in rows[1:]]


def _floats(cells, path, lineno):
    try:
        return [float(c) for c in cells]
    except ValueError:
        raise DataError(f"{path}:{lineno}: non-numeric covariate") from None


def ingest_transmissions(transmissions, region_covariates, pair_covariates=None,
                         log_columns=(), standardize: bool = True, ordered: bool = True) -> IngestedData:
    """Build the complete digraph (self-loops included) and the ordered trace.

    The source of the earliest transmission is taken as the seed region.  With
    ``ordered=False`` only per-edge counts are returned.
    """
    tpath, rpath = Path(transmissions), Path(region_covariates)
    rheader, rrows = _read_table(rpath)
    if not rheader or rheader[0] != "region":
        raise DataError(f"{rpath}:1: first column must be 'region'")
    regions = [r[0] for _, r in rrows]
    if len(set(regions)) != len(regions):
        raise DataError(f"{rpath}: duplicate region name")
    index = {name: i for i, name in enumerate(regions)}
    n = len(regions)
    rvals = np.array([_floats(r[1:], rpath, ln) for ln, r in rrows], dtype=float).reshape(n, -1)
    rnames = rheader[1:]

    src = np.repeat(np.arange(n), n)
    dst = np.tile(np.arange(n), n)
    cols = [rvals[src, j] for j in range(len(rnames))] + [rvals[dst, j] for j in range(len(rnames))]
    names = [f"src_{c}" for c in rnames] + [f"dst_{c}" for c in rnames]

    if pair_covariates is not None:
        ppath = Path(pair_covariates)
        pheader, prows = _read_table(ppath)
        if pheader[:2] != ["src_region", "dst_region"]:
            raise DataError(f"{ppath}:1: header must start with src_region,dst_region")
        pvals = np.full((n * n, len(pheader) - 2), np.nan)
        for ln, r in prows:
            for name in r[:2]:
                if name not in index:
                    raise DataError(f"{ppath}:{ln}: unknown region {name!r}")
            pvals[index[r[0]] * n + index[r[1]]] = _floats(r[2:], ppath, ln)
        if np.isnan(pvals).any():
            raise DataError(f"{ppath}: pair covariates missing for some ordered region pairs")
        cols += [pvals[:, j] for j in range(pvals.shape[1])]
        names += pheader[2:]

    X = np.column_stack(cols) if cols else np.zeros((n * n, 0))
    for name in log_columns:
        targets = [j for j, nm in enumerate(names) if nm == name or nm in (f"src_{name}", f"dst_{name}")]
        if not targets:
            raise DataError(f"unknown covariate {name!r} for log transform")
        for j in targets:
            if np.any(X[:, j] <= 0):
                raise DataError(f"covariate {names[j]!r} has non-positive values; cannot take log")
            X[:, j] = np.log(X[:, j])
    if standardize and X.shape[1]:
        sd = X.std(axis=0)
        if np.any(sd == 0):
            raise DataError(f"constant covariate {names[int(np.flatnonzero(sd == 0)[0])]!r} cannot be standardised")
        X = (X - X.mean(axis=0)) / sd

    g = complete_graph(n, X, loops=True)

    theader, trows = _read_table(tpath)
    if theader != ["t", "src_region", "dst_region"]:
        raise DataError(f"{tpath}:1: header must be t,src_region,dst_region")
    records = []
    for ln, r in trows:
        if len(r) != 3:
            raise DataError(f"{tpath}:{ln}: expected 3 fields")
        for name in r[1:]:
            if name not in index:
                raise DataError(f"{tpath}:{ln}: unknown region {name!r}")
        try:
            t = float(r[0])
        except ValueError:
            raise DataError(f"{tpath}:{ln}: t must be numeric") from None
        records.append((t, ln, index[r[1]], index[r[2]]))
    if not records:
        raise DataError(f"{tpath}: no transmissions")
    records.sort(key=lambda rec: (rec[0], rec[1]))
    seed = records[0][2]
    events = np.array([u * n + v for _, _, u, v in records], dtype=np.int64)
    tr = Trace(seed, events)
    try:
        counts_from_trace(g, tr)
    except InvalidTrace:
        infected = {seed}
        for _, ln, u, v in records:
            if u not in infected:
                raise InvalidTrace(
                    f"{tpath}:{ln}: source region {regions[u]!r} has no earlier infection"
                ) from None
            infected.add(v)
        raise
    if ordered:
        return IngestedData(g, regions, names, tr, None)
    return IngestedData(g, regions, names, None, UnorderedData.from_trace(g, tr))
