"""
Command-line entry point.

    kdvlab <experiment> [--config cfg.json] [--seed N] [--out DIR] [--threads N]

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, emit_outputs, parse_config
from .spectral import ConfigurationError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdvlab",
        description="KdV spectral simulator with modified-energy diagnostics",
    )
    parser.add_argument("experiment", choices=sorted(EXPERIMENTS))
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--threads", type=int, help="worker threads (results identical)")
    return parser


def _summary_ok(summary: dict) -> bool:
    for key in ("all_passed", "passed", "smallness_ok"):
        if key in summary and not summary[key]:
            return False
    return True


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = parse_config(args.config) if args.config else ExperimentConfig()
        overrides = {"experiment": args.experiment}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.out is not None:
            overrides["output_dir"] = args.out
        if args.threads is not None:
            overrides["threads"] = args.threads
        config = dataclasses.replace(config, **overrides)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    try:
        results = EXPERIMENTS[config.experiment](config)
        emit_outputs(results, config, config.output_dir)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # checks and numerics surface as failures
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 1

    summary = results.get("summary", {})
    if not _summary_ok(summary):
        print("checks failed; see summary.json", file=sys.stderr)
        return 1
    print(f"{config.experiment}: ok (outputs in {config.output_dir})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
