"""Command-line interface.

``reentrysim run <scenario>`` flies one trajectory; ``reentrysim mc <scenario>``
runs a dispersion campaign. Exit codes: 0 success, 1 scenario or I/O error,
2 run failed (or every campaign run failed), 64 bad usage.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from datetime import datetime
from pathlib import Path

from . import __version__
from .errors import ScenarioError, UsageError
from .montecarlo import DispersionSpec, run_batch
from .records import summary_lines, write_report, write_runs_table, write_summary, write_trajectory
from .scenario import load_scenario, simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SCENARIO = 1
EXIT_RUN_FAILED = 2
EXIT_USAGE = 64

OUTPUT_DIR_ENV = "REENTRYSIM_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "results"
_OUT_HELP = f"output directory (default ${OUTPUT_DIR_ENV} or ./{DEFAULT_OUTPUT_DIR})"


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="reentrysim",
        description="3-DOF reentry trajectory simulator with Monte Carlo dispersion runs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="fly one trajectory")
    run.add_argument("scenario", type=Path)
    run.add_argument("--out", type=Path, help=_OUT_HELP)
    run.add_argument("--dt", type=float, help="integration step in seconds")
    run.add_argument("--timestamp", action="store_true", help="stamp output file names")

    mc = sub.add_parser("mc", help="run a Monte Carlo campaign")
    mc.add_argument("scenario", type=Path)
    mc.add_argument("--runs", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True)
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--out", type=Path, help=_OUT_HELP)
    mc.add_argument("--no-dispersion", action="store_true", help="zero every dispersion sigma")
    mc.add_argument("--timestamp", action="store_true", help="stamp output file names")
    return parser


def output_dir(out: Path | None) -> Path:
    if out is not None:
        return out
    return Path(os.getenv(OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR))


def _stem(scenario_path: Path, timestamp: bool) -> str:
    stem = scenario_path.stem
    if timestamp:
        stem += "-" + datetime.now().strftime("%Y%m%dT%H%M%S")
    return stem


def _cmd_run(args: argparse.Namespace) -> int:
    if args.dt is not None and not args.dt > 0.0:
        raise UsageError(f"--dt must be positive, got {args.dt}")
    scenario = load_scenario(args.scenario)
    trajectory = simulate(scenario, dt=args.dt)

    out = output_dir(args.out)
    stem = _stem(args.scenario, args.timestamp)
    write_trajectory(trajectory, out / f"{stem}.trajectory.csv")
    write_summary(trajectory, scenario, out / f"{stem}.summary.txt")
    print("\n".join(summary_lines(trajectory, scenario)))

    if not trajectory.succeeded:
        print(
            f"reentrysim: run ended with {trajectory.termination.reason.value} "
            f"at t={trajectory.final.t:.2f} s",
            file=sys.stderr,
        )
        return EXIT_RUN_FAILED
    return EXIT_OK


def _cmd_mc(args: argparse.Namespace) -> int:
    if args.runs < 1:
        raise UsageError(f"--runs must be at least 1, got {args.runs}")
    if args.seed < 0:
        raise UsageError(f"--seed must be non-negative, got {args.seed}")
    if args.workers < 1:
        raise UsageError(f"--workers must be at least 1, got {args.workers}")
    scenario = load_scenario(args.scenario)
    spec = DispersionSpec.none() if args.no_dispersion else DispersionSpec()
    report = run_batch(
        args.runs,
        args.seed,
        scenario,
        spec,
        parallelism=args.workers,
        verbose=args.verbose > 0,
    )

    out = output_dir(args.out)
    stem = _stem(args.scenario, args.timestamp)
    write_runs_table(report, out / f"{stem}.runs.csv")
    path = write_report(report, out / f"{stem}.report.json")
    print(f"{report.n_runs} runs, {report.n_failures} failed; report written to {path}")

    if report.all_failed:
        print(f"reentrysim: all {report.n_runs} runs failed", file=sys.stderr)
        return EXIT_RUN_FAILED
    return EXIT_OK


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def main(argv: list[str] | None = None) -> int:
    """Entry point of the ``reentrysim`` console script; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"reentrysim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return exc.code if isinstance(exc.code, int) else EXIT_OK

    _configure_logging(args.verbose)
    handler = _cmd_run if args.command == "run" else _cmd_mc
    try:
        return handler(args)
    except UsageError as exc:
        print(f"reentrysim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"reentrysim: {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except OSError as exc:
        print(f"reentrysim: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
