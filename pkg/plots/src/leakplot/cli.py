"""Command line entry point: render sweep CSVs to an image file."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, render


def _parse_range(raw: str) -> tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"expected lo,hi (got {raw!r})")
    lo, hi = (float(p) for p in parts)
    if not lo < hi:
        raise argparse.ArgumentTypeError(
            f"range must satisfy lo < hi (got {raw!r})")
    return lo, hi


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="leakplot",
        description="Render sweep CSV files into a log-log "
                    "logical-error-rate figure.")
    parser.add_argument("inputs", nargs="+", metavar="CSV",
                        help="sweep CSV files to plot")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS,
                        help="figure layout")
    parser.add_argument("--out", required=True,
                        help="output image path (.png, .pdf, .svg)")
    parser.add_argument("--xlim", type=_parse_range, default=None,
                        metavar="LO,HI", help="x-axis range")
    parser.add_argument("--ylim", type=_parse_range, default=None,
                        metavar="LO,HI", help="y-axis range")
    args = parser.parse_args(argv)
    spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind,
                      out_path=args.out, xlim=args.xlim, ylim=args.ylim)
    try:
        render(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
