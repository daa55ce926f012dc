"""Run every canned parameter study and drop the CSVs under results/.

Usage: python scripts/reproduce_figures.py [--samples N] [--seed S]
"""
import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vaxgame.cli import reproduce_figure


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    outdir = Path(args.outdir)
    for fig_id in (1, 2, 3, 4, 5):
        t0 = time.perf_counter()
        path = reproduce_figure(fig_id, outdir, seed=args.seed,
                                samples=args.samples)
        print(f"figure {fig_id}: {path}  ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
