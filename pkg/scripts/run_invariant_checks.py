#!/usr/bin/env python3
"""Run the coupling invariant checks and the closed-form bound audit.

First drives the coupled-chain checker (pathwise inequalities, the ratio
limit law, collision frequencies, stutter waiting times), then audits every
closed-form bound against its oracle grid.  Exits nonzero if the coupling
checker finds a violation; the bound audit reports its verdicts on stderr,
including the one grid point where the printed closed form is genuinely
exceeded.
"""

from __future__ import annotations

import argparse
import sys

from growthsim.cli import main


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out-checks", help="output directory")
    parser.add_argument("--runs", type=int, default=10000, help="coupled runs")
    parser.add_argument("--trials", type=int, default=100000, help="audit trials")
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    return parser.parse_args(argv)


if __name__ == "__main__":
    args = parse_args()
    code = main(
        [
            "couple-check",
            "--out", args.out,
            "--runs", str(args.runs),
            "--seed", str(args.seed),
        ]
    )
    audit = main(
        [
            "bounds-audit",
            "--out", args.out,
            "--trials", str(args.trials),
            "--seed", str(args.seed),
        ]
    )
    sys.exit(code or audit)
