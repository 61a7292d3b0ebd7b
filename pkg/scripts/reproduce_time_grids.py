#!/usr/bin/env python3
"""Reproduce the consensus-time heatmap grids.

Sweeps the A-B protocol over a log-spaced rate plane (gamma, delta both in
[0.01, 10] at fixed initial counts) and over a log-spaced initial-count
plane (both counts in [1, 1000] at gamma = 0.01, delta = 1), writing
rates.csv, counts.csv, their JSON twins, and manifest.json to the output
directory.
"""

from __future__ import annotations

import argparse
import sys

from growthsim.cli import main


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-ab-time-grid", help="output directory")
    parser.add_argument("--grid-points", type=int, default=12, help="grid side length")
    parser.add_argument("--trials", type=int, default=1000, help="trials per point")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    return parser.parse_args(argv)


if __name__ == "__main__":
    args = parse_args()
    sys.exit(
        main(
            [
                "ab-time-grid",
                "--out", args.out,
                "--grid-points", str(args.grid_points),
                "--trials", str(args.trials),
                "--seed", str(args.seed),
                "--workers", str(args.workers),
            ]
        )
    )
