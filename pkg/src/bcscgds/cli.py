"""Command-line entry point: ``bcscgds {run,bench,profile,curve}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bench
from .problems import CATALOG
from .solver import SolverParams


def _cmd_run(args) -> int:
    params = SolverParams(budget_multiplier=args.budget_mult)
    record = bench.run_cell(args.problem, args.dim, args.variant, args.seed, args.eps_f, params)
    path = bench.save_record(record, args.out)
    print(f"{path}  final={record.final_value:.6g}  initial={record.initial_value:.6g}")
    return 0


def _cmd_bench(args) -> int:
    with open(args.config) as fh:
        config = json.load(fh)
    result = bench.run_experiment(config, args.out, workers=args.workers)
    print(f"wrote {len(result.paths)} records to {args.out}")
    for cell, msg in result.failures:
        print(f"failed {cell}: {msg}", file=sys.stderr)
    return 1 if result.failures else 0


def _cmd_profile(args) -> int:
    table = bench.performance_profile(bench.load_records(args.inp), args.tau, mode=args.mode)
    bench.write_profile_csv(table, args.out)
    for s in table.solvers:
        print(f"{s}: rho(1)={table.curves[s][0]:.3f}")
    return 0


def _cmd_curve(args) -> int:
    rows = bench.curve_rows(bench.load_records(args.inp), args.problem, args.dim, args.variant)
    bench.write_curve_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcscgds", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a single problem cell")
    p.add_argument("--problem", required=True, choices=sorted(CATALOG))
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--variant", choices=["smooth", "piecewise"], default="smooth")
    p.add_argument("--eps-f", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-mult", type=int, default=40)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("bench", help="run a grid described by a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("profile", help="performance profile CSV from records")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--tau", type=float, default=1e-2)
    p.add_argument("--mode", choices=["seed", "median"], default="seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("curve", help="progress curve CSV from records")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--variant", choices=["smooth", "piecewise"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_curve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
