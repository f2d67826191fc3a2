#!/usr/bin/env python3
"""Regenerate the CSV data behind every figure into one directory."""

import argparse
import sys

from fuzzybox import cli

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures-out")
    args = ap.parse_args()
    sys.exit(cli.main(["figures", "--all", "--out", args.out]))
