"""Command line wrapper: render --csv <path> --out <path> [--linear-y] [--title ...]."""
from __future__ import annotations

import argparse
import sys

from .render import FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risnoma-render",
        description="Render a risnoma outage CSV into a semilog figure")
    parser.add_argument("--csv", required=True, help="input CSV path")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--linear-y", action="store_true",
                        help="linear instead of logarithmic y axis")
    parser.add_argument("--title", default=None, help="figure title")
    parser.add_argument("--series-keys", default=None,
                        help="comma-separated identity columns defining the series")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    keys = None
    if args.series_keys is not None:
        keys = tuple(k.strip() for k in args.series_keys.split(",") if k.strip())
    spec = FigureSpec(csv_path=args.csv, series_keys=keys,
                      y_log=not args.linear_y, title=args.title)
    try:
        result = render(spec, args.out)
    except (ValueError, OSError) as exc:
        print(f"risnoma-render: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({result.n_series} series, "
          f"{result.n_analytic} analytic, {result.n_asymptote} asymptotes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
