"""Command-line interface.

Exit codes: 0 ok, 2 usage, 3 data error, 4 non-existence or divergence,
5 spectral failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import DataError, NotConverged, RankDeficient, UrnSpreadError
from .existence import NOT_EXISTS, check_mle_existence
from .experiment import METHODS, ExperimentConfig, config_dict, report_csv, run_experiment
from .general import fit_general_weights, project_to_beta
from .graph import load_graph, write_graph
from .inference import infer
from .likelihood import (CONVERGED, LikelihoodContext, _evaluate, fit_mle, vertex_context)
from .simulate import counts_from_trace, simulate_trace, simulate_vertex_trace
from .unordered import UnorderedData, empirical_weight_estimate, fixed_point_estimate

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NONEXIST = 4
EXIT_SPECTRAL = 5


def parse_vector(text: str) -> np.ndarray:
    """A JSON file, a JSON list, or comma-separated numbers."""
    p = Path(text)
    if p.is_file():
        text = p.read_text(encoding="utf-8")
    text = text.strip()
    try:
        val = json.loads(text) if text.startswith(("[", "{")) else [float(t) for t in text.split(",")]
    except ValueError:
        raise DataError(f"cannot parse vector {text!r}") from None
    if isinstance(val, dict):
        val = val.get("beta")
    if isinstance(val, (int, float)):
        val = [val]
    try:
        return np.asarray(val, dtype=float).reshape(-1)
    except (TypeError, ValueError):
        raise DataError(f"cannot parse vector {text!r}") from None


def _emit(obj, out) -> None:
    text = io.dump_json(obj, out)
    print(text)


def _unordered(args, g) -> UnorderedData:
    if args.trace:
        return UnorderedData.from_trace(g, io.read_trace(g, args.trace))
    if not args.counts:
        raise DataError("give --counts or --trace")
    c, seed = io.read_counts(g, args.counts)
    if args.seed_vertex is not None:
        seed = args.seed_vertex - 1
    b = io.read_vertex_counts(g, args.vertex_counts) if args.vertex_counts else None
    if seed is None and b is None:
        raise DataError("seed vertex unknown: add a '# seed_vertex=' line, --seed-vertex or --vertex-counts")
    try:
        return UnorderedData.from_counts(g, c, seed_vertex=seed, b=b)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def _weights_payload(g, w, support, status=None) -> dict:
    out = {"weights": [float(x) for x in w], "support": [int(e) + 1 for e in support]}
    if status is not None:
        out["status"] = status
    try:
        out["beta_projected"] = [float(b) for b in project_to_beta(w, g.covariates, support)]
    except RankDeficient:
        out["beta_projected"] = None
    return out


def cmd_simulate(args) -> int:
    g = load_graph(args.graph)
    beta = parse_vector(args.beta)
    seed_vertex = None if args.seed_vertex is None else args.seed_vertex - 1
    if args.vertex:
        io.write_vertex_trace(simulate_vertex_trace(g, beta, args.steps, args.seed, seed_vertex), args.out)
        return EXIT_OK
    tr = simulate_trace(g, beta, args.steps, args.seed, seed_vertex)
    io.write_trace(g, tr, args.out)
    if args.counts_out:
        io.write_counts(g, counts_from_trace(g, tr), args.counts_out, seed_vertex=tr.seed_vertex)
    return EXIT_OK


def _mle_like(args, ctx) -> int:
    if args.eval_beta is not None:
        beta = parse_vector(args.eval_beta)
        if beta.shape[0] != ctx.d:
            raise DataError(f"--eval-beta has dimension {beta.shape[0]}, data has d={ctx.d}")
        if ctx.k == 1:
            ll, g, H = -np.log(ctx.n), np.zeros(ctx.d), np.zeros((ctx.d, ctx.d))
        else:
            ll, g, H = _evaluate(ctx, beta)
        _emit({"beta": [float(b) for b in beta], "loglik": float(ll),
               "grad_norm": float(np.max(np.abs(g), initial=0.0)), "iterations": 0,
               "status": "Evaluated", "hessian": [float(h) for h in H.ravel()]}, args.out)
        return EXIT_OK
    init = None if args.init is None else parse_vector(args.init)
    fit = fit_mle(ctx, init=init, tol=args.tol, max_iters=args.max_iters,
                  norm_cap=args.norm_cap, check_existence=args.check_existence)
    payload = fit.to_dict()
    if fit.status == CONVERGED and ctx.k > 1:
        payload.update(infer(ctx, fit.beta, alpha=args.alpha, burn_in=args.burn_in).to_dict())
    _emit(payload, args.out)
    return EXIT_OK if fit.status == CONVERGED else EXIT_NONEXIST


def cmd_fit(args) -> int:
    g = load_graph(args.graph)
    method = args.method
    if method == "vertex":
        if not args.vertex_trace:
            raise DataError("fit vertex needs --vertex-trace")
        return _mle_like(args, vertex_context(g, io.read_vertex_trace(g, args.vertex_trace)))
    if method in ("mle", "gw"):
        if not args.trace:
            raise DataError(f"fit {method} needs --trace")
        ctx = LikelihoodContext.from_trace(g, io.read_trace(g, args.trace))
        if method == "mle":
            return _mle_like(args, ctx)
        res = fit_general_weights(ctx, tol=args.tol, max_iters=args.max_iters, norm_cap=args.norm_cap)
        _emit(_weights_payload(g, res.weights, res.support, res.fit.status), args.out)
        return EXIT_OK if res.fit.status == CONVERGED else EXIT_NONEXIST
    data = _unordered(args, g)
    if method == "empirical":
        w = empirical_weight_estimate(g, data)
    else:
        w = fixed_point_estimate(g, data, T=args.iters)
    _emit(_weights_payload(g, w, np.flatnonzero(w > 0)), args.out)
    return EXIT_OK


def cmd_check_existence(args) -> int:
    g = load_graph(args.graph)
    ctx = LikelihoodContext.from_trace(g, io.read_trace(g, args.trace))
    res = check_mle_existence(ctx, max_rows=args.max_rows)
    _emit(res.to_dict(), args.out)
    return EXIT_NONEXIST if res.status == NOT_EXISTS else EXIT_OK


def cmd_experiment(args) -> int:
    rows = []
    beta0 = None if args.beta0 is None else list(parse_vector(args.beta0))
    configs = []
    for k in args.k:
        try:
            cfg = ExperimentConfig(topology=args.topology, n=args.n, d=args.d, k=k, reps=args.reps,
                                   seed=args.seed, covariate_sd=args.covariate_sd, beta0=beta0,
                                   alpha=args.alpha, methods=tuple(args.methods), trim=args.trim,
                                   burn_in=args.burn_in, fp_iters=args.fp_iters)
        except ValueError as exc:
            raise DataError(str(exc)) from None
        configs.append(cfg)
        rows.append(run_experiment(cfg, jobs=args.jobs))
    text = report_csv(rows, timing=args.timing)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if args.config_out:
            io.dump_json([config_dict(c) for c in configs], args.config_out)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_ingest(args) -> int:
    from .ingest import ingest_transmissions

    data = ingest_transmissions(args.transmissions, args.regions, pair_covariates=args.pairs,
                                log_columns=args.log, standardize=not args.no_standardize)
    write_graph(data.graph, args.graph_out)
    if args.trace_out:
        io.write_trace(data.graph, data.trace, args.trace_out)
    if args.counts_out:
        io.write_counts(data.graph, counts_from_trace(data.graph, data.trace), args.counts_out,
                        seed_vertex=data.trace.seed_vertex)
    print(json.dumps({"regions": data.regions, "covariates": data.covariate_names,
                      "edges": data.graph.m, "k": data.trace.k}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="urnspread", description="Edge-weight estimation for reinforced spreading on graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate an ordered trace")
    s.add_argument("--graph", required=True)
    s.add_argument("--beta", required=True, help="JSON file, JSON list, or comma-separated numbers")
    s.add_argument("--steps", type=int, required=True, help="number of infections k (seed included)")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed-vertex", type=int, help="1-based seed vertex (default: uniform)")
    s.add_argument("--vertex", action="store_true", help="write the source-marginalised vertex sequence")
    s.add_argument("--counts-out", help="also write the unordered counts CSV")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit weights or coefficients")
    f.add_argument("method", choices=["mle", "gw", "empirical", "fixedpoint", "vertex"])
    f.add_argument("--graph", required=True)
    f.add_argument("--trace")
    f.add_argument("--vertex-trace")
    f.add_argument("--counts")
    f.add_argument("--vertex-counts")
    f.add_argument("--seed-vertex", type=int)
    f.add_argument("--eval-beta", help="evaluate the log-likelihood here instead of fitting")
    f.add_argument("--init")
    f.add_argument("--tol", type=float, default=1e-8)
    f.add_argument("--max-iters", type=int, default=200)
    f.add_argument("--norm-cap", type=float, default=50.0)
    f.add_argument("--check-existence", action="store_true")
    f.add_argument("--alpha", type=float, default=0.05)
    f.add_argument("--burn-in", type=int, default=0)
    f.add_argument("--iters", type=int, default=5, help="fixed-point iterations")
    f.add_argument("--out")
    f.set_defaults(func=cmd_fit)

    c = sub.add_parser("check-existence", help="decide whether the MLE exists")
    c.add_argument("--graph", required=True)
    c.add_argument("--trace", required=True)
    c.add_argument("--max-rows", type=int, default=5000)
    c.add_argument("--out")
    c.set_defaults(func=cmd_check_existence)

    e = sub.add_parser("experiment", help="Monte Carlo study on cycle graphs")
    e.add_argument("--topology", choices=["cycle", "cycle_with_loops"], default="cycle")
    e.add_argument("--n", type=int, default=50)
    e.add_argument("--d", type=int, default=1)
    e.add_argument("--k", type=int, nargs="+", default=[1000])
    e.add_argument("--reps", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--covariate-sd", type=float, default=0.01)
    e.add_argument("--beta0")
    e.add_argument("--alpha", type=float, default=0.05)
    e.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    e.add_argument("--trim", type=float, default=10.0)
    e.add_argument("--burn-in", type=int, default=0)
    e.add_argument("--fp-iters", type=int, default=5)
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--timing", action="store_true", help="add mean fit time columns")
    e.add_argument("--out")
    e.add_argument("--config-out")
    e.set_defaults(func=cmd_experiment)

    i = sub.add_parser("ingest", help="build a complete-graph data set from region transmissions")
    i.add_argument("--transmissions", required=True)
    i.add_argument("--regions", required=True)
    i.add_argument("--pairs")
    i.add_argument("--log", nargs="*", default=[], help="covariates to log-transform")
    i.add_argument("--no-standardize", action="store_true")
    i.add_argument("--graph-out", required=True)
    i.add_argument("--trace-out")
    i.add_argument("--counts-out")
    i.set_defaults(func=cmd_ingest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPECTRAL
    except (UrnSpreadError, ValueError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
