"""Command-line interface: run scenarios, verify invariant suites, measure orders.

    nullgauge run <config> [--out DIR] [--seed N] [--override section.key=value]... [--no-plot]
    nullgauge verify <suite>
    nullgauge converge <csv1> <csv2> <csv3> [--out DIR]

Exit codes: 0 ok, 1 config error, 2 invariant failure, 3 runtime breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_config
from .errors import ConfigError, SimulationError
from .scenarios import (
    EXIT_CONFIG,
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_RUNTIME,
    convergence_report,
    run_scenario,
)

VERIFY_SUITES = ("stencils", "kgm", "unitary", "em-only", "bohm", "dirac-flow", "majorana", "all")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nullgauge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario from a config file")
    run_p.add_argument("config", help="path to the INI-style scenario config")
    run_p.add_argument("--out", help="output directory (overrides run.out_dir)")
    run_p.add_argument("--seed", type=int, help="RNG seed (overrides run.seed)")
    run_p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="set a config key; repeatable")
    run_p.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    ver_p = sub.add_parser("verify", help="run a built-in invariant suite")
    ver_p.add_argument("suite", choices=VERIFY_SUITES)

    con_p = sub.add_parser("converge", help="observed orders from three compare CSVs (coarse to fine)")
    con_p.add_argument("csv", nargs=3)
    con_p.add_argument("--out", help="directory for the orders figure", default=None)

    return parser


def _cmd_run(args) -> int:
    try:
        config = load_config(args.config, overrides=args.override)
    except FileNotFoundError:
        print(f"config file not found: {args.config}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        for ln, msg in exc.problems:
            where = f"{args.config}:{ln}: " if ln is not None else f"{args.config}: "
            print(where + msg, file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    result = run_scenario(config, out_dir=args.out, plot=not args.no_plot)
    status = result.manifest["status"]
    out_dir = args.out if args.out is not None else config.out_dir
    print(f"[{config.scenario}] status={status} out={out_dir}")
    for inv in result.manifest["invariants"]:
        mark = "PASS" if inv["passed"] else "FAIL"
        print(f"  {mark} {inv['name']}: {inv['value']:.3e} (tol {inv['tolerance']:.3e})")
    if result.manifest["failure"]:
        print(f"  failure: {result.manifest['failure']['message']}", file=sys.stderr)
    return result.exit_code


def _cmd_verify(args) -> int:
    from . import verify

    suites = verify.SUITES.keys() if args.suite == "all" else [args.suite]
    all_ok = True
    for name in suites:
        checks = verify.SUITES[name]()
        for c in checks:
            mark = "PASS" if c.passed else "FAIL"
            print(f"{mark} [{name}] {c.name}: {c.value:.3e} (tol {c.tolerance:.3e})")
            all_ok &= c.passed
    return EXIT_OK if all_ok else EXIT_INVARIANT


def _cmd_converge(args) -> int:
    try:
        report = convergence_report(args.csv)
    except (SimulationError, FileNotFoundError, OSError) as exc:
        print(f"converge: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps({q: {"values": r["values"], "orders": list(r["orders"])}
                      for q, r in report.items()}, indent=2))
    if args.out is not None:
        from .plots import render_convergence_report
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = render_convergence_report(report, out)
        print(f"figure: {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "converge":
        return _cmd_converge(args)
    return EXIT_CONFIG  # unreachable with required=True


if __name__ == "__main__":
    sys.exit(main())
