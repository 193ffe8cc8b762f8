#!/usr/bin/env python3
"""Check that estimate ratios stay stable across grid sizes and seeds.

At constant rank the max ratio over random band-limited fields should be
insensitive to resolution and to the random seed; this script prints the
max per (p, N, seed) cell for eyeballing.
"""

import argparse

from symrank import ratio_sweep, zoo_get


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("name", nargs="?", default="divergence", help="zoo operator name")
    parser.add_argument("--p", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    parser.add_argument("--N", type=int, nargs="+", default=[16, 32])
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1])
    args = parser.parse_args()

    op = zoo_get(args.name)
    print(f"{op.name}: max estimate ratio over {args.trials} random fields")
    for p in args.p:
        for size in args.N:
            row = []
            for seed in args.seeds:
                report = ratio_sweep(op, p=p, trials=args.trials, grid_sizes=[size], seed=seed)
                row.append(f"seed {seed}: {report.max_ratio:.6f}")
            print(f"  p={p:<4} N={size:<3}  " + "   ".join(row))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
