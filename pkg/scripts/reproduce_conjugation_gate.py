#!/usr/bin/env python3
"""Reproduce the bacterial-scale conjugation gate simulation.

Tau-leaps the conjugation NAND gate with 2.5e8 cells per input signal,
carrying capacity 1e9, duplication rate 0.016 per minute, conjugation rate
1e-11, and 10 percent input error, for all four input combinations over 30
minutes.  Writes one mean-trajectory CSV per input pair plus a dominance
summary to the output directory.
"""

from __future__ import annotations

import argparse
import sys

from growthsim.cli import main


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-nand-sim", help="output directory")
    parser.add_argument("--samples", type=int, default=30, help="runs per input pair")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    return parser.parse_args(argv)


if __name__ == "__main__":
    args = parse_args()
    sys.exit(
        main(
            [
                "nand-sim",
                "--out", args.out,
                "--samples", str(args.samples),
                "--seed", str(args.seed),
                "--workers", str(args.workers),
            ]
        )
    )
