"""Entry point: render one figure kind from a harness CSV.

    sipsticky-plot --kind variance-vs-t --input variance_vs_t.csv \
                   --out variance.png

With --all, renders every standard figure from a directory of acceptance
CSVs using the conventional file names.
"""

from __future__ import annotations

import argparse
import os
import sys

from .figures import KINDS, FigureSpec, render
from .reader import PlotError

STANDARD_FILES = {
    "variance-vs-t": "variance_vs_t.csv",
    "error-vs-N": "error_vs_N.csv",
    "kernel-profile": "sticky_kernel.csv",
    "path-trace": "sticky_path.csv",
}


def render_all(in_dir: str, out_dir: str, fmt: str = "png") -> list:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for kind, fname in STANDARD_FILES.items():
        src = os.path.join(in_dir, fname)
        dst = os.path.join(out_dir, fname.replace(".csv", f".{fmt}"))
        written.append(render(FigureSpec(kind=kind, input_path=src,
                                         output_path=dst)))
    return written


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(prog="sipsticky-plot")
    parser.add_argument("--kind", choices=KINDS)
    parser.add_argument("--input", help="harness CSV file")
    parser.add_argument("--out", help="output image path")
    parser.add_argument("--all", metavar="DIR",
                        help="render every standard figure from DIR")
    parser.add_argument("--out-dir", default="figures",
                        help="output directory for --all")
    args = parser.parse_args(argv)
    try:
        if args.all:
            for path in render_all(args.all, args.out_dir):
                print(path)
        elif args.kind and args.input and args.out:
            print(render(FigureSpec(kind=args.kind, input_path=args.input,
                                    output_path=args.out)))
        else:
            parser.error("need either --all DIR or --kind/--input/--out")
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)


if __name__ == "__main__":
    main()
