"""Command-line front end: one figure per invocation.

Flags mirror FigureSpec fields.  Exit codes: 0 success, 1 for runtime
failures (unreadable input, schema mismatch, empty CSV), 2 for usage errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .figure import OVERLAY_KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twochoices-plot",
        description=(
            "Plot mean consensus time per node (T/n) against network size "
            "from twochoices CSV output, with a fitted growth-curve overlay."
        ),
    )
    parser.add_argument(
        "--csv",
        dest="csv_paths",
        metavar="PATH",
        nargs="+",
        required=True,
        help="input CSV file(s) in the simulate or exact schema; one series each",
    )
    parser.add_argument(
        "--out",
        required=True,
        metavar="PATH",
        help="output image path; format follows the suffix (.png, .svg, ...)",
    )
    parser.add_argument(
        "--overlay",
        choices=OVERLAY_KINDS,
        default="log",
        help="reference curve to fit and draw dashed: c*ln n, c*exp(b*n), or c*n "
        "(default: log; exp switches the y axis to log scale)",
    )
    parser.add_argument(
        "--fit-window",
        type=float,
        default=0.5,
        metavar="FRAC",
        help="fraction of the largest distinct n values used for the fit "
        "(default: 0.5)",
    )
    parser.add_argument("--title", default="", help="figure title")
    parser.add_argument(
        "--xlabel", default="network size n", help="x-axis label"
    )
    parser.add_argument(
        "--ylabel",
        default="mean consensus time per node T/n",
        help="y-axis label",
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            csv_paths=args.csv_paths,
            out_path=args.out,
            overlay=args.overlay,
            fit_window=args.fit_window,
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
        )
    except ValueError as exc:
        parser.error(str(exc))
    try:
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
