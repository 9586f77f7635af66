"""plot: render a figure from a run directory.

    plot --run <dir> --kind <kind> --out <file.svg|file.png>
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, FigureSpec, render
from .io import RunDataError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a figure from a run directory")
    parser.add_argument("--run", required=True,
                        help="run directory with diagnostics.csv + report.json")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True,
                        help="output file (.svg or .png)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(run_dir=args.run, kind=args.kind, out_path=args.out)
        out = render(spec)
    except (RunDataError, ValueError) as exc:
        print(f"plot error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
