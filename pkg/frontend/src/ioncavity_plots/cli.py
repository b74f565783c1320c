"""Command line entry point: render --figure <id> --data <dir> --out <dir>."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, FigureSkipped, render
from .loader import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a figure from scan CSV outputs.",
    )
    parser.add_argument(
        "--figure",
        required=True,
        choices=sorted(FIGURES),
        help="which figure to draw",
    )
    parser.add_argument(
        "--data",
        required=True,
        help="directory holding scan.csv / semiclassical.csv (and optional dumps)",
    )
    parser.add_argument(
        "--out",
        required=True,
        help="directory to write the figure into (created if absent)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        target = render(args.figure, args.data, args.out)
    except FigureSkipped as exc:
        print(f"skipped {args.figure}: {exc}")
        return 0
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(target)
    return 0


if __name__ == "__main__":
    sys.exit(main())
