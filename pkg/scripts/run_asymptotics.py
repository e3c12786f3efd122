#!/usr/bin/env python3
"""Normalized-risk boundedness sweep and adaptive-weight decay sweep."""

import argparse
import sys

from modelavg.cli import main

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/asymptotics")
    parser.add_argument("--seed", default="5050")
    parser.add_argument("--beta", default="0.5")
    args = parser.parse_args()
    common = ["--seed", args.seed, "--beta", args.beta]
    rc = main(["riskbound", *common, "--out", f"{args.out}/riskbound"])
    rc |= main(["decay", *common, "--out", f"{args.out}/decay"])
    rc |= main(["decay", "--seed", args.seed, "--beta", "0.0", "--out", f"{args.out}/decay_null"])
    sys.exit(rc)
