#!/usr/bin/env python3
"""Reproduce the randomized-scheduler reference table.

For each of the five (m, n, k) rows, prints the analytic lower bound on the
mean aggregate cardinality next to the simulated mean over random runs.

Usage: python scripts/reproduce_bound_table.py [--runs 100] [--seed 0] [--trials 20000]
"""

import argparse

from gtexchange import compare_table, reference_bound_configs


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=20_000,
                        help="coverage-probability sampling trials per row")
    args = parser.parse_args()
    configs = reference_bound_configs(runs=args.runs, seed=args.seed, pmnk_trials=args.trials)
    print(compare_table(configs))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
