"""Command-line interface.

Subcommands: solve, simulate, search-cex, benchmark. All runs are
deterministic given flags and seeds; repeated invocations produce
byte-identical output files.

Exit codes: 0 success (including a solve whose policy violates the
continuous order property, which is reported, not fatal); 2 usage or
instance-file errors; 3 grid or numerical errors; 4 simulation budget
exhausted before the confidence target.
"""

from __future__ import annotations

import argparse
import os
import sys

from .cex import CexSearchParams, search_cop_violations
from .demand import PARAMETRIC_FAMILIES
from .files import InstanceFormatError, dump_instance, load_instance, thresholds_csv
from .heuristic import modified_ss_from_tables
from .policy import CopViolated, extract_thresholds
from .sdp import DEFAULT_GRID, Grid, GridSpanError, solve
from .simulate import (SimulationConfig, SimulationError, gap_with_estimates,
                       modified_ss_policy, simulate_policy, table_policy)
from .testbed import build_design, run_benchmark

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4


def _add_grid_flags(parser):
    parser.add_argument("--grid-min", type=int, default=DEFAULT_GRID.x_min,
                        help="lowest inventory state on the grid")
    parser.add_argument("--grid-max", type=int, default=DEFAULT_GRID.x_max,
                        help="highest inventory state on the grid")


def _add_sim_flags(parser):
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed for the common random number streams")
    parser.add_argument("--confidence", type=float, default=0.95,
                        help="confidence level for the interval check")
    parser.add_argument("--rel-error", type=float, default=1e-4,
                        help="target half-width relative to the mean")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochinv",
        description="Capacitated stochastic lot sizing: solve, analyze, simulate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve an instance and extract thresholds")
    p_solve.add_argument("instance", help="instance file (JSON)")
    _add_grid_flags(p_solve)
    p_solve.add_argument("--out", default=None,
                         help="output prefix (default: instance path sans extension)")

    p_sim = sub.add_parser("simulate", help="Monte Carlo policy evaluation")
    p_sim.add_argument("instance", help="instance file (JSON)")
    p_sim.add_argument("--policy", choices=("optimal", "modified-ss", "both"),
                       default="both", help="which policy to evaluate")
    p_sim.add_argument("--max-reps", type=int, default=50_000_000,
                       help="replication budget before giving up on the target")
    _add_grid_flags(p_sim)
    _add_sim_flags(p_sim)

    p_cex = sub.add_parser("search-cex",
                           help="random search for order-property violations")
    p_cex.add_argument("--seed", type=int, required=True,
                       help="seed for the instance generator stream")
    p_cex.add_argument("--budget", type=int, default=1000,
                       help="number of instances to generate and screen")
    p_cex.add_argument("--equal-masses", action="store_true",
                       help="give the four support points equal probability")
    p_cex.add_argument("--out", default=".",
                       help="directory for violator files and the manifest")

    p_bench = sub.add_parser("benchmark", help="run a demand-family test bed")
    p_bench.add_argument("--family", required=True, choices=PARAMETRIC_FAMILIES,
                         help="demand family to benchmark")
    p_bench.add_argument("--scale", type=float, default=1.0,
                         help="fraction of the full design to run (0, 1]")
    p_bench.add_argument("--threads", type=int, default=1,
                         help="worker threads for instance evaluation")
    _add_grid_flags(p_bench)
    _add_sim_flags(p_bench)
    p_bench.add_argument("--out", default=None,
                         help="pivot CSV path (default: benchmark_<family>.csv)")
    return parser


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    tables = solve(instance, Grid(args.grid_min, args.grid_max))

    out = args.out if args.out is not None else os.path.splitext(args.instance)[0]
    tables_path = out + "_tables.csv"
    tables.to_csv(tables_path)

    entries = []
    violated = []
    for period in range(1, instance.horizon + 1):
        try:
            entries.append(extract_thresholds(tables, period))
        except CopViolated as exc:
            violated.append((period, exc.report))
    for period, _ in violated:
        print(f"warning: continuous order property violated, period {period}")

    print(f"value tables: {tables_path}")
    if entries:
        thresholds_path = out + "_thresholds.csv"
        with open(thresholds_path, "w") as handle:
            handle.write(thresholds_csv(entries))
        print(f"thresholds: {thresholds_path}")
    if violated:
        report_path = out + "_cop_report.txt"
        with open(report_path, "w") as handle:
            for period, report in violated:
                handle.write(f"period {period}: {report.describe()}\n")
        print(f"order-property report: {report_path}")

    print("period  (s_k, S_k) pairs")
    by_period = {entry.period: entry for entry in entries}
    for period in range(1, instance.horizon + 1):
        if period in by_period:
            pairs = " ".join(f"({s},{S})" for s, S in by_period[period].pairs)
            print(f"{period:>6}  {pairs if pairs else '- never orders -'}")
        else:
            print(f"{period:>6}  order property violated")
    return EXIT_OK


def cmd_simulate(args) -> int:
    instance = load_instance(args.instance)
    tables = solve(instance, Grid(args.grid_min, args.grid_max))
    config = SimulationConfig(base_seed=args.seed, confidence=args.confidence,
                              target_rel_error=args.rel_error,
                              max_reps=args.max_reps)
    x0 = 0

    estimates = {}
    if args.policy == "both":
        gap, opt, heur = gap_with_estimates(
            instance, tables, modified_ss_from_tables(tables), x0, config)
        estimates["optimal"] = opt
        estimates["modified-ss"] = heur
    elif args.policy == "optimal":
        estimates["optimal"] = simulate_policy(instance, table_policy(tables),
                                               x0, config)
    else:
        policy = modified_ss_policy(modified_ss_from_tables(tables), instance.B)
        estimates["modified-ss"] = simulate_policy(instance, policy, x0, config)

    for name, est in estimates.items():
        print(f"{name}: mean {_fmt(est.mean_cost)} +/- {_fmt(est.half_width)} "
              f"({est.reps} reps)")
    if args.policy == "both":
        print(f"gap: {gap:.3f}%")
    if not all(est.converged for est in estimates.values()):
        print("budget exhausted before reaching the confidence target",
              file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_search_cex(args) -> int:
    params = CexSearchParams(seed=args.seed, budget=args.budget,
                             equal_masses=args.equal_masses)
    violations = search_cop_violations(params)

    os.makedirs(args.out, exist_ok=True)
    manifest_path = os.path.join(args.out, "manifest.csv")
    with open(manifest_path, "w") as handle:
        handle.write("seed,index,period,witness_lo,witness_hi\n")
        for v in violations:
            lo, hi = v.report.violation_witness
            handle.write(f"{args.seed},{v.index},{v.period},{lo},{hi}\n")
            dump_instance(v.instance,
                          os.path.join(args.out, f"violator_{v.index}.json"))

    print(f"screened {args.budget} instances, {len(violations)} violation(s)")
    for v in violations:
        print(f"  index {v.index}: period {v.period}, "
              f"witness {v.report.violation_witness}")
    print(f"manifest: {manifest_path}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    design = build_design((args.family,), scale=args.scale)
    config = SimulationConfig(base_seed=args.seed, confidence=args.confidence,
                              target_rel_error=args.rel_error)
    grid = Grid(args.grid_min, args.grid_max)
    report = run_benchmark(design, config, grid=grid, threads=args.threads)

    out = args.out if args.out is not None else f"benchmark_{args.family}.csv"
    report.to_csv(out)

    gaps = [r.gap for r in report.results if r.error is None]
    print(f"{args.family}: {len(design)} instances, "
          f"{len(report.cop_violations)} order-property violation(s), "
          f"{len(report.errors)} error(s)")
    if gaps:
        print(f"gap avg {sum(gaps) / len(gaps):.3f}%  max {max(gaps):.3f}%")
    print(f"pivot: {out}")
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "search-cex": cmd_search_cex,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InstanceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GridSpanError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
