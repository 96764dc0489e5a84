"""Command-line interface.

Subcommands:
  bounds   compute the analytic bounds for the configured (n, m, d)
  run      Monte Carlo error estimate for a single configuration
  sweep    one estimate per (n, m) pair, emitted incrementally

Configuration comes from a JSON file (--config); flags override individual
fields.  Without a config the case-study defaults apply (alpha=1 prior on
[1, 10], adaptive qubit protocol with n=1, m=200).  Exit codes: 0 success,
1 configuration error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .bounds import compute_bounds_report
from .errors import ConfigurationError
from .harness import (
    ExperimentConfig,
    OutputSpec,
    _csv_row,
    CSV_COLUMNS,
    emit,
    estimate_emsle,
    iter_sweep,
    load_config,
)
from .priors import PriorSpec, discretize
from .protocol import Adaptation, ProtocolConfig

__all__ = ["main", "build_parser", "default_config"]


def default_config() -> ExperimentConfig:
    """Case-study defaults: alpha=1 prior on [1, 10], adaptive qubit rounds."""
    return ExperimentConfig(
        prior=PriorSpec(alpha=1.0, theta_min=1.0, theta_max=10.0),
        protocol=ProtocolConfig(n=1, m=200, d=2),
    )


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="JSON experiment config")
    sub.add_argument("--seed", type=int, metavar="U64", help="master seed override")
    sub.add_argument("--trajectories", type=int, metavar="K", help="trajectory budget override")
    sub.add_argument("--grid-size", type=int, metavar="K", help="grid size override")
    sub.add_argument("--workers", type=int, metavar="K", help="concurrent trajectory workers")
    sub.add_argument("--out", metavar="PATH", help="output file (stdout if omitted)")
    sub.add_argument("--format", choices=("csv", "json"), help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayestherm",
        description="Bayesian equilibrium thermometry simulations and bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="analytic bounds only")
    _add_common_flags(p_bounds)

    p_run = sub.add_parser("run", help="single-point Monte Carlo estimate")
    _add_common_flags(p_run)
    mode = p_run.add_mutually_exclusive_group()
    mode.add_argument("--adaptive", action="store_true", help="re-optimize the gap every round")
    mode.add_argument("--non-adaptive", action="store_true", help="fix the gap from the prior")

    p_sweep = sub.add_parser("sweep", help="estimate every configured (n, m) pair")
    _add_common_flags(p_sweep)
    return parser


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.trajectories is not None:
        config = replace(config, trajectories=args.trajectories)
    if args.grid_size is not None:
        config = replace(config, grid_size=args.grid_size)
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    out_path = args.out if args.out is not None else config.output.path
    out_fmt = args.format if args.format is not None else config.output.format
    config = replace(config, output=OutputSpec(path=out_path, format=out_fmt))
    if getattr(args, "adaptive", False):
        config = replace(config, protocol=replace(config.protocol, adaptation=Adaptation.ADAPTIVE))
    if getattr(args, "non_adaptive", False):
        config = replace(
            config, protocol=replace(config.protocol, adaptation=Adaptation.NON_ADAPTIVE)
        )
    return config


def _cmd_bounds(config: ExperimentConfig) -> int:
    dist = discretize(config.prior, config.grid_size)
    proto = config.protocol
    report = compute_bounds_report(dist, proto.n, proto.m, proto.d)
    doc = {"n": proto.n, "m": proto.m, "d": proto.d, **report.as_dict()}
    if config.output.path:
        try:
            with open(config.output.path, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            raise OSError(f"cannot write bounds to {config.output.path}: {exc}") from exc
    else:
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def _cmd_run(config: ExperimentConfig) -> int:
    report = estimate_emsle(config)
    if config.output.path:
        emit(report, config.output.path, config.output.format)
    else:
        json.dump(report.to_dict(), sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


def _cmd_sweep(config: ExperimentConfig) -> int:
    out = config.output
    if out.path and out.format == "csv":
        # incremental: one row per completed point
        try:
            with open(out.path, "w", newline="", encoding="utf-8") as fh:
                fh.write(",".join(CSV_COLUMNS) + "\n")
                fh.flush()
                for report in iter_sweep(config):
                    fh.write(",".join(_csv_row(report)) + "\n")
                    fh.flush()
                    print(f"done n={report.n} m={report.m}", file=sys.stderr)
        except OSError as exc:
            raise OSError(f"cannot write sweep to {out.path}: {exc}") from exc
        return 0
    reports = []
    for report in iter_sweep(config):
        reports.append(report)
        print(f"done n={report.n} m={report.m}", file=sys.stderr)
    if out.path:
        emit(reports, out.path, out.format)
    else:
        json.dump([r.to_dict() for r in reports], sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


_COMMANDS = {"bounds": _cmd_bounds, "run": _cmd_run, "sweep": _cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        return _COMMANDS[args.command](config)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
