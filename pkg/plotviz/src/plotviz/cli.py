"""Batch plotting command line: one figure per invocation, no GUI.

Exit codes: 0 success, 2 bad input data or arguments, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .render import render_cdf, render_surface
from .spec import PlotDataError, PlotSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotviz", description="Render figures from simulator CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cdf = sub.add_parser("cdf", help="throughput CDF overlay")
    p_cdf.add_argument("--csv", required=True, nargs="+",
                       help="cdf_<dl|ul>.csv input file(s)")
    p_cdf.add_argument("--labels", default="",
                       help="comma list of run labels (default: all)")
    p_cdf.add_argument("--out", required=True, help="output image path")

    for name, help_text in (("surface", "gain heatmap over (X, Y)"),
                            ("gain-vs-bias", "gain lines vs bias per X")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--csv", required=True, nargs="+",
                       help="surface_<dl|ul>.csv input file(s)")
        p.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "cdf":
            labels = tuple(l for l in args.labels.split(",") if l)
            spec = PlotSpec(tuple(args.csv), "cdf_overlay", args.out, labels)
            render_cdf(spec)
        else:
            kind = "gain_surface" if args.command == "surface" else "gain_vs_bias"
            spec = PlotSpec(tuple(args.csv), kind, args.out)
            render_surface(spec)
    except PlotDataError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
