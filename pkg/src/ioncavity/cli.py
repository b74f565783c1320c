"""Command line entry point: run / semiclassical / validate."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, validate_config
from .scan import run_scan, run_semiclassical


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ioncavity",
        description="Steady-state and bifurcation scans of a trapped ion in a pumped cavity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="plain-text key=value configuration file")
        p.add_argument("--output-dir", default=None, help="override the configured output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads across kappa values")
        p.add_argument("--seed", type=int, default=0,
                       help="reserved; affects nothing physical")

    p_run = sub.add_parser("run", help="full quantum + semiclassical scan")
    add_common(p_run)
    p_semi = sub.add_parser("semiclassical", help="semiclassical branches only")
    add_common(p_semi)
    p_val = sub.add_parser("validate", help="validate a configuration file")
    p_val.add_argument("config")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = validate_config(args.config)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1

    if args.command == "validate":
        sys.stdout.write(config.resolved_text())
        return 0
    if args.command == "semiclassical":
        out = run_semiclassical(config, args.output_dir)
    else:
        out = run_scan(config, args.output_dir, threads=args.threads)
    print(f"results written to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
