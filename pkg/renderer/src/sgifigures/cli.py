"""Standalone figure command:  sgi-render --recipe recipe.json --out figure.png"""

from __future__ import annotations

import argparse
import sys

from .recipe import load_recipe
from .render import render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sgi-render",
                                 description="Render figures from sgiphonon CSVs")
    ap.add_argument("--recipe", required=True, help="recipe JSON path")
    ap.add_argument("--out", required=True, help="output image path (png/pdf/svg)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        recipe = load_recipe(args.recipe)
    except (OSError, ValueError) as exc:
        print(f"recipe error: {exc}", file=sys.stderr)
        return 2
    try:
        summary = render(recipe, args.out)
    except (OSError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"render error: {msg}", file=sys.stderr)
        return 1
    print(f"wrote {summary.out} ({summary.kind}, {summary.line_series} curves)")
    for n, slope in sorted(summary.slopes.items()):
        print(f"slope protocol {n}: {slope:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
