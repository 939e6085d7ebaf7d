"""Batch command-line interface.

Subcommands: mlfun (scalar function values), params (admissibility bounds),
centrality (one measure on one graph), sweep (correlation grids), temporal
(dynamic communicability trajectories).  Outputs are CSV files with a
parameter-recording comment line, plus an optional JSON stats summary for
graph-reading commands.  Exit codes: 0 success, 1 computational failure
(overflow/non-convergence, with the offending cell identified), 2 invalid
arguments or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .admissibility import mu
from .centrality import (
    Baseline,
    Measure,
    degree_centrality,
    eigenvector_centrality,
    ml_subgraph_centrality,
    ml_total_communicability,
    sweep_grid,
    write_centrality_csv,
    write_mu_csv,
    write_sweep_csv,
)
from .errors import (
    MLConvergenceError,
    MLDomainError,
    MLOverflowError,
    MatrixLogBranchError,
    ParseError,
)
from .graphio import graph_stats, load_graph
from .mlkernel import DEFAULT_KBAR, MLParams, ml_scalar
from .temporal import (
    gen_alternating_tree,
    gen_phone_cascade,
    load_schedule,
    run_model,
    write_trajectory_csv,
)


def _kbar_default() -> int:
    raw = os.environ.get("ML_KBAR")
    if raw is None:
        return DEFAULT_KBAR
    try:
        return int(raw)
    except ValueError as exc:
        raise MLDomainError(f"ML_KBAR must be an integer, got {raw!r}") from exc


def _parse_grid(spec: str) -> np.ndarray:
    """start:stop:count with inclusive endpoints."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise MLDomainError(f"grid must be start:stop:count, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise MLDomainError(f"malformed grid {spec!r}") from exc
    if count < 1:
        raise MLDomainError(f"grid count must be >= 1, got {count}")
    return np.linspace(start, stop, count)


def _write_stats_json(g, path) -> None:
    stats = graph_stats(g)
    payload = {
        "n": stats.n,
        "m": stats.m,
        "rho": stats.rho,
        "lambda2": stats.lambda2,
        "degree_min": int(stats.degrees.min()),
        "degree_max": int(stats.degrees.max()),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _cmd_mlfun(args) -> int:
    p = MLParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma)
    value = ml_scalar(args.z * args.gamma if args.apply_gamma else args.z,
                      p, tol=args.tol)
    print(repr(value))
    return 0


def _cmd_params(args) -> int:
    kbar = args.kbar if args.kbar is not None else _kbar_default()
    report = mu(args.alpha, args.rho, kbar, gamma=args.gamma)
    print(f"mu = {report.mu!r}")
    print(f"limiting = {report.limiting.value}")
    print(f"bound_monotone = {report.bound_monotone!r}")
    print(f"bound_representable = {report.bound_representable!r}")
    if args.gamma is not None:
        print(f"admissible = {str(report.admissible).lower()}")
    return 0


def _cmd_centrality(args) -> int:
    g = load_graph(args.graph)
    measure = Measure(args.measure)
    if measure is Measure.DEGREE:
        cv = degree_centrality(g)
    elif measure is Measure.EIGENVECTOR:
        cv = eigenvector_centrality(g, tol=args.tol)
    else:
        p = MLParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma)
        if measure is Measure.ML_SUBGRAPH:
            cv = ml_subgraph_centrality(g, p)
        else:
            cv = ml_total_communicability(g, p, tol=args.tol)
    comment = (
        f"graph={args.graph} alpha={args.alpha} beta={args.beta} "
        f"gamma={args.gamma} tol={args.tol}"
    )
    write_centrality_csv(cv, args.out, comment)
    if args.stats_out:
        _write_stats_json(g, args.stats_out)
    return 0


def _cmd_sweep(args) -> int:
    g = load_graph(args.graph)
    kbar = args.kbar if args.kbar is not None else _kbar_default()
    grid = sweep_grid(
        g,
        _parse_grid(args.alpha),
        _parse_grid(args.gamma),
        Baseline(args.baseline),
        Measure(args.measure),
        kbar=kbar,
    )
    comment = (
        f"graph={args.graph} alpha={args.alpha} gamma={args.gamma} kbar={kbar}"
    )
    write_sweep_csv(grid, args.out, comment)
    if args.mu_out:
        write_mu_csv(grid, args.mu_out, comment)
    if args.stats_out:
        _write_stats_json(g, args.stats_out)
    return 0


def _cmd_temporal(args) -> int:
    if args.schedule:
        net = load_schedule(args.schedule)
        source = f"schedule={args.schedule}"
    elif args.scenario == "tree":
        net = gen_alternating_tree(
            levels=args.levels, noise_edges=args.noise,
            horizon=args.horizon, seed=args.seed,
        )
        source = (
            f"scenario=tree levels={args.levels} noise={args.noise} "
            f"horizon={args.horizon} seed={args.seed}"
        )
    elif args.scenario == "phone":
        net = gen_phone_cascade(tau=args.tau, rounds=args.rounds)
        source = f"scenario=phone tau={args.tau} rounds={args.rounds}"
    else:
        raise MLDomainError("temporal needs --schedule or --scenario")
    p = MLParams(alpha=args.alpha, beta=1.0, gamma=args.gamma)
    if args.samples:
        samples = _parse_grid(args.samples)
    else:
        samples = np.array([net.t_end])
    rankings = run_model(net, p, args.b, samples)
    comment = f"{source} alpha={args.alpha} gamma={args.gamma} b={args.b}"
    write_trajectory_csv(rankings, args.out, comment)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlcent",
        description="Mittag-Leffler matrix functions and network centrality",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ml = sub.add_parser("mlfun", help="evaluate E_{alpha,beta}(z)")
    p_ml.add_argument("--alpha", type=float, required=True)
    p_ml.add_argument("--beta", type=float, default=1.0)
    p_ml.add_argument("--gamma", type=float, default=1.0)
    p_ml.add_argument("--z", type=float, required=True)
    p_ml.add_argument("--tol", type=float, default=1e-12)
    p_ml.add_argument("--apply-gamma", action="store_true",
                      help="evaluate at gamma*z instead of z")
    p_ml.set_defaults(func=_cmd_mlfun)

    p_par = sub.add_parser("params", help="admissible gamma bounds")
    p_par.add_argument("--alpha", type=float, required=True)
    p_par.add_argument("--rho", type=float, required=True)
    p_par.add_argument("--gamma", type=float, default=None,
                       help="also report whether this gamma is admissible")
    p_par.add_argument("--kbar", type=int, default=None,
                       help="override ML_KBAR / default 308")
    p_par.set_defaults(func=_cmd_params)

    p_cen = sub.add_parser("centrality", help="node centrality scores")
    p_cen.add_argument("--graph", required=True)
    p_cen.add_argument("--measure", required=True,
                       choices=[m.value for m in Measure])
    p_cen.add_argument("--alpha", type=float, default=0.5)
    p_cen.add_argument("--beta", type=float, default=1.0)
    p_cen.add_argument("--gamma", type=float, default=0.1)
    p_cen.add_argument("--tol", type=float, default=1e-10)
    p_cen.add_argument("--out", required=True)
    p_cen.add_argument("--stats-out", default=None)
    p_cen.set_defaults(func=_cmd_centrality)

    p_sw = sub.add_parser("sweep", help="Kendall-tau (alpha, gamma) grid")
    p_sw.add_argument("--graph", required=True)
    p_sw.add_argument("--measure", required=True,
                      choices=[Measure.ML_SUBGRAPH.value, Measure.ML_TOTAL_COMM.value])
    p_sw.add_argument("--baseline", default=Baseline.DEGREE.value,
                      choices=[b.value for b in Baseline])
    p_sw.add_argument("--alpha", required=True, help="grid start:stop:count")
    p_sw.add_argument("--gamma", required=True, help="grid start:stop:count")
    p_sw.add_argument("--out", required=True)
    p_sw.add_argument("--mu-out", default=None)
    p_sw.add_argument("--stats-out", default=None)
    p_sw.add_argument("--kbar", type=int, default=None)
    p_sw.set_defaults(func=_cmd_sweep)

    p_tmp = sub.add_parser("temporal", help="dynamic communicability run")
    p_tmp.add_argument("--schedule", default=None)
    p_tmp.add_argument("--scenario", choices=["tree", "phone"], default=None)
    p_tmp.add_argument("--levels", type=int, default=4)
    p_tmp.add_argument("--noise", type=int, default=5)
    p_tmp.add_argument("--horizon", type=float, default=20.0)
    p_tmp.add_argument("--seed", type=int, default=0)
    p_tmp.add_argument("--tau", type=float, default=0.1)
    p_tmp.add_argument("--rounds", type=int, default=8)
    p_tmp.add_argument("--alpha", type=float, required=True)
    p_tmp.add_argument("--gamma", type=float, required=True)
    p_tmp.add_argument("--b", type=float, default=0.0)
    p_tmp.add_argument("--samples", default=None, help="grid start:stop:count")
    p_tmp.add_argument("--out", required=True)
    p_tmp.set_defaults(func=_cmd_temporal)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (MLDomainError, ParseError, FileNotFoundError, OSError) as exc:
        print(f"mlcent: invalid input: {exc}", file=sys.stderr)
        return 2
    except (MLOverflowError, MLConvergenceError, MatrixLogBranchError) as exc:
        alpha = getattr(args, "alpha", None)
        gamma = getattr(args, "gamma", None)
        cell = f" at alpha={alpha} gamma={gamma}" if alpha is not None else ""
        print(f"mlcent: computation failed{cell}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
