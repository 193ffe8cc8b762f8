#!/usr/bin/env python3
"""Classify every zoo operator and compare against its expected verdict."""

import argparse

from symrank import rank_profile, zoo_list


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1024)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    width = max(len(e.name) for e in zoo_list())
    bad = 0
    for entry in zoo_list():
        op = entry.build()
        profile = rank_profile(op, num_samples=args.samples, seed=args.seed)
        ok = profile.verdict is entry.expected_verdict
        bad += not ok
        print(f"{entry.name:<{width}}  rank {profile.min_rank}..{profile.max_rank}  "
              f"{profile.verdict.value:<16} expected {entry.expected_verdict.value:<16} "
              f"{'ok' if ok else 'MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
