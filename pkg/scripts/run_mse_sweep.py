#!/usr/bin/env python3
"""Reproduce the MSE-versus-SNR curves for all three estimators.

Runs the full default grid (L=16, K=2, M=1000 trials, SNR 0..30 dB,
N in {40, 60, 80}) and writes one CSV row per (estimator, N, SNR) point.
Takes a couple of minutes single-threaded; pass --workers to parallelize.
"""

import sys

from twrn_cs.cli import cli_main

if __name__ == "__main__":
    args = sys.argv[1:]
    if not any(a == "--out" for a in args):
        args += ["--out", "mse.csv"]
    sys.exit(cli_main(["mse", *args]))
