"""mmdfigs command line: render experiment CSVs into figures."""

from __future__ import annotations

import argparse
import sys

from .plotdata import KINDS, FigureDataError, FigureSpec
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmdfigs",
        description="Render crossmmd experiment CSV outputs into figures.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from harness CSV output")
    p.add_argument("--kind", choices=KINDS, required=True,
                   help="hist (raw statistic dump), power, roc, or bench")
    p.add_argument("--in", dest="csv", required=True,
                   help="input CSV (raw dump for hist, points CSV for roc, "
                        "aggregates CSV otherwise)")
    p.add_argument("--agg", default=None,
                   help="aggregates CSV with the auc column (roc only)")
    p.add_argument("--sidecar", default=None,
                   help="harness JSON sidecar; when given, its experiment kind "
                        "must match --kind")
    p.add_argument("--out", required=True, help="output image path (.png or .svg)")
    p.add_argument("--title", default=None, help="figure title override")
    p.add_argument("--bins", type=int, default=None,
                   help="histogram bin count (default Freedman-Diaconis)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, csv=args.csv, out=args.out,
                          agg=args.agg, sidecar=args.sidecar,
                          title=args.title, bins=args.bins)
        paths = render(spec)
    except FigureDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
