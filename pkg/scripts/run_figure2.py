#!/usr/bin/env python3
"""Full-scale resampling-accuracy curves (100 datasets x 500 resamples per point)."""

import argparse
import sys

from modelavg.cli import main

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/figure2")
    parser.add_argument("--seed", default="5050")
    args = parser.parse_args()
    common = ["--seed", args.seed]
    rc = main(["figure2", "--method", "subsample", *common, "--out", f"{args.out}/panel_a"])
    rc |= main(["figure2", "--method", "bootstrap", *common, "--out", f"{args.out}/panel_b"])
    sys.exit(rc)
