"""Monte Carlo harness: simulate, fit every estimator, summarise errors and intervals.

Per-rep seeds come from a splitmix64 hash of ``(master_seed, rep)`` so reps are
independent of worker count and order.  Covariates are redrawn for every rep.
"""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import UrnSpreadError
from .general import fit_general_weights, project_to_beta
from .graph import cycle_graph, cycle_with_loops_graph
from .inference import infer
from .likelihood import CONVERGED, MAX_ITERS, LikelihoodContext, fit_mle
from .simulate import make_rng, simulate_trace
from .unordered import UnorderedData, empirical_weight_estimate, fixed_point_estimate

METHODS = ("emp", "mle", "gw", "fp")
TOPOLOGIES = ("cycle", "cycle_with_loops")
_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def rep_seed(master_seed: int, rep: int) -> int:
    """Seed for replication ``rep``: two rounds of splitmix64 over master and index."""
    return splitmix64(splitmix64(master_seed & _MASK) ^ (rep & _MASK))


@dataclass
class ExperimentConfig:
    topology: str = "cycle"
    n: int = 50
    d: int = 1
    k: int = 1000
    reps: int = 100
    seed: int = 0
    covariate_sd: float = 0.01
    beta0: list | None = None
    alpha: float = 0.05
    methods: tuple = METHODS
    trim: float = 10.0
    burn_in: int = 0
    fp_iters: int = 5

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}")
        if self.reps < 1 or self.n < 2 or self.d < 1 or self.k < 1:
            raise ValueError("need reps >= 1, n >= 2, d >= 1, k >= 1")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods {sorted(bad)}")
        self.methods = tuple(m for m in METHODS if m in self.methods)
        if self.beta0 is None:
            self.beta0 = [1.0] * self.dim
        if len(self.beta0) != self.dim:
            raise ValueError(f"beta0 must have length {self.dim}")

    @property
    def dim(self) -> int:
        return self.d + (1 if self.topology == "cycle_with_loops" else 0)


@dataclass
class RepResult:
    rep: int
    estimates: dict = field(default_factory=dict)   # method -> beta_hat or None
    times: dict = field(default_factory=dict)
    ci: tuple | None = None                         # (lo, hi) for coordinate 1
    numerical_error: bool = False


def _build_graph(cfg: ExperimentConfig, rng):
    X = rng.normal(0.0, cfg.covariate_sd, size=(cfg.n, cfg.d))
    if cfg.topology == "cycle":
        return cycle_graph(cfg.n, X)
    return cycle_with_loops_graph(cfg.n, X)


def run_rep(cfg: ExperimentConfig, rep: int) -> RepResult:
    rng = make_rng(rep_seed(cfg.seed, rep))
    g = _build_graph(cfg, rng)
    beta0 = np.asarray(cfg.beta0, dtype=float)
    tr = simulate_trace(g, beta0, cfg.k, seed=int(rng.integers(2**63)))
    out = RepResult(rep)
    ctx = LikelihoodContext.from_trace(g, tr)
    data = UnorderedData.from_trace(g, tr)

    for method in cfg.methods:
        t0 = time.perf_counter()
        est = None
        try:
            if method == "emp":
                w = empirical_weight_estimate(g, data)
                est = project_to_beta(w, g.covariates, np.flatnonzero(w > 0))
            elif method == "fp":
                w = fixed_point_estimate(g, data, T=cfg.fp_iters)
                est = project_to_beta(w, g.covariates, np.flatnonzero(w > 0))
            elif method == "gw":
                res = fit_general_weights(ctx)
                if res.fit.status in (CONVERGED, MAX_ITERS):
                    est = project_to_beta(res.weights, g.covariates, res.support)
            else:
                fit = fit_mle(ctx)
                if fit.status in (CONVERGED, MAX_ITERS):
                    est = fit.beta
        except (UrnSpreadError, ValueError, np.linalg.LinAlgError):
            est = None
        out.times[method] = time.perf_counter() - t0
        if est is not None and np.all(np.isfinite(est)):
            out.estimates[method] = np.asarray(est, dtype=float)
        else:
            out.estimates[method] = None

    if "mle" in cfg.methods:
        est = out.estimates["mle"]
        if est is None or cfg.k - cfg.burn_in < 1:
            out.numerical_error = True
        else:
            inf = infer(ctx, est, alpha=cfg.alpha, burn_in=min(cfg.burn_in, ctx.k - 1))
            if inf.numerical_flag or not np.all(np.isfinite(inf.ci[0])):
                out.numerical_error = True
            else:
                out.ci = (float(inf.ci[0, 0]), float(inf.ci[0, 1]))
    return out


def _rmse(errs, d):
    if not errs:
        return float("nan")
    return float(np.sqrt(np.mean([float(e @ e) / d for e in errs])))


def summarize(cfg: ExperimentConfig, results) -> dict:
    """Aggregate rep results (sorted by rep index first) into one report row."""
    results = sorted(results, key=lambda r: r.rep)
    beta0 = np.asarray(cfg.beta0, dtype=float)
    d = beta0.size
    reps = len(results)
    row = {"topology": cfg.topology, "n": cfg.n, "d": cfg.d, "k": cfg.k, "reps": reps}
    for m in cfg.methods:
        errs = [r.estimates[m] - beta0 for r in results if r.estimates[m] is not None]
        kept = [e for e in errs if np.max(np.abs(e)) <= cfg.trim]
        row[f"rmse_{m}"] = _rmse(errs, d)
        row[f"fail_{m}"] = 100.0 * (reps - len(errs)) / reps
        row[f"trimmed_rmse_{m}"] = _rmse(kept, d)
        row[f"kept_{m}"] = 100.0 * len(kept) / reps
    if "mle" in cfg.methods:
        b1 = beta0[0]
        row["ne"] = 100.0 * sum(r.numerical_error for r in results) / reps
        row["cov"] = 100.0 * sum(bool(r.ci is not None and r.ci[0] <= b1 <= r.ci[1]) for r in results) / reps
        lens = [r.ci[1] - r.ci[0] for r in results if r.ci is not None]
        row["avg_len"] = float(np.mean(lens)) if lens else float("nan")
        dev = [abs(r.estimates["mle"][0] - b1) for r in results if r.estimates["mle"] is not None]
        row["nec_len"] = float(np.quantile(dev, 0.95)) if dev else float("nan")
    for m in cfg.methods:
        row[f"time_{m}"] = float(np.mean([r.times[m] for r in results]))
    return row


def _run_rep_args(args):
    return run_rep(*args)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> dict:
    tasks = [(cfg, r) for r in range(cfg.reps)]
    if jobs <= 1:
        results = [run_rep(c, r) for c, r in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_rep_args, tasks))
    return summarize(cfg, results)


def report_csv(rows, timing: bool = False) -> str:
    """CSV text for report rows.  Timing columns are off by default so the
    output is reproducible byte for byte."""
    cols = []
    for row in rows:
        for key in row:
            if key not in cols and (timing or not key.startswith("time_")):
                cols.append(key)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([_fmt(row.get(c, "")) for c in cols])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return "nan" if np.isnan(v) else f"{v:.6g}"
    return v


def config_dict(cfg: ExperimentConfig) -> dict:
    out = asdict(cfg)
    out["methods"] = list(cfg.methods)
    return out
