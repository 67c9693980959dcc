"""Shared entry point behind the render_figN.py scripts."""

from __future__ import annotations

import argparse
import sys

from .loader import DataError
from .render import render


def main(figure: str, argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog=f"render_{figure}.py",
        description=f"Render {figure} from a boost experiment output "
                    "directory.")
    parser.add_argument("data_dir",
                        help="directory written by the matching "
                             "'boost run' experiment")
    parser.add_argument("out_path", help="output image path (e.g. out.png)")
    args = parser.parse_args(argv)
    try:
        render(figure, args.data_dir, args.out_path)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(args.out_path)
    return 0
