"""Command-line entry point.

Subcommands: ``run`` (single experiment), ``sweep`` (ratio sweep with the
comparison table), ``verify`` (randomized property suites) and ``plot``
(plot-ready tables from a report).

Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 oracle mismatch,
4 verification failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    InvalidConfigError,
    MissingTrajectoryError,
    NormDriftExceededError,
    NumericalInconsistencyError,
    OracleMismatchError,
    RotationRegimeError,
    StepRejectionExhaustedError,
)
from .experiment import (
    ExperimentConfig,
    emit_plot_data,
    format_sweep_table,
    run,
    sweep,
    write_sweep_table,
)
from .verification import run_verification

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_ORACLE = 3
EXIT_VERIFY = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adiabloch",
        description="Adiabatic qubit dynamics on the Bloch sphere",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single experiment config")
    p_run.add_argument("--config", required=True, help="path to a JSON config file")

    p_sweep = sub.add_parser("sweep", help="equatorial ratio sweep with envelope table")
    p_sweep.add_argument("--ratios", required=True, help="comma-separated omega0/Omega ratios")
    p_sweep.add_argument("--config", required=True, help="equatorial base config (JSON)")
    p_sweep.add_argument("--workers", type=int, default=None,
                         help="parallel worker processes (default: all cores)")

    p_verify = sub.add_parser("verify", help="run the randomized verification suites")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--cases", type=int, default=100)

    p_plot = sub.add_parser("plot", help="emit plot data files from a run report")
    p_plot.add_argument("--report", required=True, help="path to a report.json")
    p_plot.add_argument("--out-dir", default=None)
    p_plot.add_argument("--svg", action="store_true", help="also render an SVG")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = ExperimentConfig.from_file(args.config)
            report = run(config, Path(args.config).parent)
            print(f"trajectory: {report.trajectory_path}")
            print(f"report: {Path(report.trajectory_path).parent / 'report.json'}")
            dev = report.diagnostics["max_eigen_deviation"]
            print(f"max eigen-deviation: {dev:.6g}; oracle gap: {report.oracle_max_fs_distance:.3e}")
            return EXIT_OK

        if args.command == "sweep":
            try:
                ratios = [float(r) for r in args.ratios.split(",") if r.strip()]
            except ValueError as exc:
                raise InvalidConfigError(f"--ratios: {exc}") from exc
            if not ratios:
                raise InvalidConfigError("--ratios: at least one ratio required")
            base = ExperimentConfig.from_file(args.config)
            workers = args.workers
            entries = sweep(ratios, base, Path(args.config).parent, workers=workers)
            table_path = base.out_dir / "sweep_table.csv"
            base.out_dir.mkdir(parents=True, exist_ok=True)
            write_sweep_table(entries, table_path)
            print(format_sweep_table(entries))
            print(f"table: {table_path}")
            return EXIT_OK if all(e.passed for e in entries) else EXIT_NUMERICAL

        if args.command == "verify":
            if args.cases < 1:
                print("verify: --cases must be at least 1", file=sys.stderr)
                return EXIT_CONFIG
            results = run_verification(args.seed, args.cases)
            for res in results:
                print(res.line())
            failed = [r for r in results if not r.passed]
            print(f"{len(results) - len(failed)}/{len(results)} suites passed")
            return EXIT_OK if not failed else EXIT_VERIFY

        if args.command == "plot":
            written = emit_plot_data(args.report, args.out_dir, svg=args.svg)
            for path in written:
                print(f"wrote {path}")
            return EXIT_OK

    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NormDriftExceededError, StepRejectionExhaustedError,
            NumericalInconsistencyError, RotationRegimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OracleMismatchError as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except MissingTrajectoryError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
