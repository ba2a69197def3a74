"""Seeded batch over the 75/100-node grid (R/C/RC; 4-6 MHCs at 75 nodes, 6-8 at 100).

Writes runs.csv, boxplot.csv and timings.csv into --out.
Usage: python scripts/run_large_scale.py [--runs 10] [--iters 10000] [--workers 4] [--out results/large]
"""

import argparse
import sys

from mhc_sync.cli import main


def cli():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", default="10")
    ap.add_argument("--iters", default="10000")
    ap.add_argument("--workers", default="1")
    ap.add_argument("--out", default="results/large")
    a = ap.parse_args()
    return main(["experiment", "--preset", "large", "--products", "2", "--runs", a.runs,
                 "--iters", a.iters, "--workers", a.workers, "--out", a.out])


if __name__ == "__main__":
    sys.exit(cli())
