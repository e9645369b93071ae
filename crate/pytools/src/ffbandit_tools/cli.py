from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import DEFAULT_CATEGORIES, DEFAULT_SELECTED, SourceMissing, prepare_corpus
from .formats import FormatError
from .plot import plot_regret


def prepare_main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(prog="prepare-corpus", description="Export a TF-IDF corpus for the ffbandit runner.")
    p.add_argument("--categories", nargs="+", default=list(DEFAULT_CATEGORIES))
    p.add_argument("--target-dim", type=int, default=1000)
    p.add_argument("--full", action="store_true", help="keep the whole vocabulary instead of --target-dim")
    p.add_argument("--selected", type=int, default=DEFAULT_SELECTED, help="classifier features to keep")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", type=Path, help="directory with one subdirectory of documents per category")
    p.add_argument("--out", type=Path, required=True)
    args = p.parse_args(argv)
    try:
        export = prepare_corpus(
            categories=args.categories,
            target_dim=None if args.full else args.target_dim,
            seed=args.seed,
            source=args.source,
            n_selected=args.selected,
        )
        export.write(args.out)
    except SourceMissing as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, FormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sizes = ", ".join(f"{k}={len(v)}" for k, v in export.annotations.items())
    print(f"{export.matrix.shape[0]} documents x {export.dim} features; relevant: {sizes}")
    return 0


def plot_main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(prog="plot-regret", description="Plot cumulative regret from a summary CSV.")
    p.add_argument("--summary", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--title")
    args = p.parse_args(argv)
    try:
        plot_regret(args.summary, args.out, args.title)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(prepare_main())
