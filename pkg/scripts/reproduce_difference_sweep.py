#!/usr/bin/env python3
"""Reproduce the win-probability sweep over the initial count difference.

Runs the A-B protocol at totals 100, 1000, and 10000 with 21 difference
points per total and writes stats.csv, stats.json, and manifest.json to the
output directory.  Every option of the underlying ``growthsim ab-sweep``
command can be overridden on the command line.
"""

from __future__ import annotations

import argparse
import sys

from growthsim.cli import main


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-ab-sweep", help="output directory")
    parser.add_argument("--trials", type=int, default=10000, help="trials per point")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    return parser.parse_args(argv)


if __name__ == "__main__":
    args = parse_args()
    sys.exit(
        main(
            [
                "ab-sweep",
                "--out", args.out,
                "--trials", str(args.trials),
                "--seed", str(args.seed),
                "--workers", str(args.workers),
            ]
        )
    )
