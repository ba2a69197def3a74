"""Search vs exhaustive optimum on small two-MHC, two-product instances.

Prints one line per instance and a summary of how many land within 2% of the optimum.
Usage: python scripts/oracle_check.py [--count 30] [--capacity 12] [--iters 5000]
"""

import argparse
import random
import time

from mhc_sync import AlnsConfig, GeneratorConfig, exact_solve, generate_instance, parse_solomon, run
from mhc_sync.instance import synthetic_solomon

KINDS = ("R", "C", "RC")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--count", type=int, default=30)
    ap.add_argument("--capacity", type=int, default=12)
    ap.add_argument("--iters", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=2024)
    a = ap.parse_args()

    rng = random.Random(a.seed)
    within = 0
    for j in range(a.count):
        kind, n, seed = KINDS[j % 3], (5, 6, 7)[j % 3], rng.randrange(2 ** 31)
        inst = generate_instance(
            GeneratorConfig(kind, n, 2, 2, seed=seed, capacity=a.capacity),
            parse_solomon(synthetic_solomon(kind, 100, seed=seed)),
        )
        t0 = time.perf_counter()
        _, _, opt = exact_solve(inst)
        t_opt = time.perf_counter() - t0
        found = run(inst, AlnsConfig(iter_max=a.iters, seed=j)).objective
        gap = 100 * (found - opt) / opt
        within += gap <= 2.0
        print(f"{j:2d} {kind:2s} n={n} optimum={opt:.3f} search={found:.3f} gap={gap:.2f}% oracle={t_opt:.1f}s")
    print(f"within 2%: {within}/{a.count}")


if __name__ == "__main__":
    main()
