"""Synchronized vs multi-trip gap table over the R/C/RC x T/E x 3/4-MHC grid at 30 nodes.

Usage: python scripts/run_comparison.py [--instances 10] [--iters 1000] [--workers 1] [--out gaps.csv]
"""

import argparse
import sys

from mhc_sync.cli import main


def cli():
    ap = argparse.ArgumentParser()
    ap.add_argument("--instances", default="10")
    ap.add_argument("--iters", default="1000")
    ap.add_argument("--workers", default="1")
    ap.add_argument("--out", default="gaps.csv")
    a = ap.parse_args()
    return main([
        "compare", "--network", "R", "C", "RC", "--capacity", "22", "32", "--mhc", "3", "4",
        "--nodes", "30", "--products", "1", "--demand", "5",
        "--instances", a.instances, "--iters", a.iters, "--workers", a.workers, "--out", a.out,
    ])


if __name__ == "__main__":
    sys.exit(cli())
