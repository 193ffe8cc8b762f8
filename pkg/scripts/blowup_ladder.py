#!/usr/bin/env python3
"""Drive the estimate ratio up a rank-drop frequency ladder.

For operators whose symbol rank drops somewhere on the sphere the ratio
||D^k(phi - P_A phi)||_p / ||A phi||_p admits no uniform bound; this
script prints the measured ratio per ladder rung for each requested p.
"""

import argparse

from symrank import (Grid, WitnessConfig, build_frequency_ladder, estimate_ratio,
                     find_rank_drop_witness, rank_profile, witness_family, zoo_get)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("name", nargs="?", default="d1d2", help="zoo operator name")
    parser.add_argument("--rungs", type=int, default=4)
    parser.add_argument("--N", type=int, default=64)
    parser.add_argument("--p", type=float, nargs="+", default=[1.0, 2.0, float("inf")])
    parser.add_argument("--window", type=float, default=None,
                        help="bump width in (0, 1]; default exact single modes")
    args = parser.parse_args()

    op = zoo_get(args.name)
    profile = rank_profile(op)
    witness = find_rank_drop_witness(op, profile)
    ladder = build_frequency_ladder(op, witness.xi_low, rungs=args.rungs)
    print(f"{op.name}: drop direction {tuple(round(float(x), 6) for x in witness.xi_low)}, "
          f"ladder {ladder}")
    grid = Grid(op.n, args.N)
    fields = witness_family(op, WitnessConfig(frequencies=tuple(ladder), window=args.window), grid)
    for p in args.p:
        ratios = [estimate_ratio(op, phi, p) for phi in fields]
        growth = ratios[-1] / ratios[0]
        print(f"  p={p:<4}  " + "  ".join(f"{r:10.4f}" for r in ratios)
              + f"   growth {growth:.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
