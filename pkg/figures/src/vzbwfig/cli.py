"""Command line entry point.

Usage::

    plot <kind> --in <csv> [--in <csv>] --out <png|svg>

Exit codes: 0 on success, 2 for any input problem (missing file, missing
sidecar, schema mismatch, bad output format).
"""

from __future__ import annotations

import argparse
import sys

from vzbwfig.io import FigureInputError
from vzbwfig.render import KINDS, FigureSpec, render_to_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a figure from vzbw CSV output files.",
    )
    parser.add_argument(
        "kind",
        choices=sorted(KINDS),
        help="figure kind to draw",
    )
    parser.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="CSV",
        help="input CSV file (repeatable; each needs its .meta.json sidecar)",
    )
    parser.add_argument(
        "--out",
        required=True,
        metavar="IMAGE",
        help="output image path (.png or .svg)",
    )
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    spec = FigureSpec(
        kind=args.kind, inputs=tuple(args.inputs), output=args.out
    )
    try:
        render_to_file(spec)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {spec.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
