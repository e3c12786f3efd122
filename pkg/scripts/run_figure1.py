#!/usr/bin/env python3
"""Full-scale MSE and KS-ratio curves (n=50, 5000 replications, 41-point grid)."""

import argparse
import sys

from modelavg.cli import main

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/figure1")
    parser.add_argument("--seed", default="5050")
    args = parser.parse_args()
    rc = main(["figure1a", "--seed", args.seed, "--out", f"{args.out}/panel_a"])
    rc |= main(["figure1b", "--seed", args.seed, "--out", f"{args.out}/panel_b"])
    sys.exit(rc)
