#!/usr/bin/env python3
"""Monte Carlo sweep for the randomized near-cover stage.

For m = c * q**n with a few values of c, estimate the mean and spread of
the missing-word count over many seeds, and compare against the crude
exp(-c/2) tail shape.  Useful for eyeballing how long the random stage
needs to be before the patch stage becomes trivial.

    python scripts/approx_sweep.py --q 2 --n 8 --seeds 30
"""
import argparse
import math
import statistics
import sys

from ucycle.approx import type2_random


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--seeds", type=int, default=30)
    ap.add_argument("--factors", type=float, nargs="+",
                    default=[1, 2, 4, 8])
    args = ap.parse_args()

    q, n = args.q, args.n
    I = tuple(range(n))
    words = q ** n
    print(f"q={q} n={n} ({words} words), {args.seeds} seeds per row")
    print(f"{'c':>6} {'m':>8} {'mean miss':>10} {'stdev':>8} "
          f"{'frac':>8} {'exp(-c/2)':>10}")
    for c in args.factors:
        m = max(1, int(c * words))
        misses = [type2_random(q, n, I, m, seed=s)[1]
                  for s in range(args.seeds)]
        mean = statistics.mean(misses)
        sd = statistics.stdev(misses) if len(misses) > 1 else 0.0
        print(f"{c:6.1f} {m:8d} {mean:10.2f} {sd:8.2f} "
              f"{mean / words:8.4f} {math.exp(-c / 2):10.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
