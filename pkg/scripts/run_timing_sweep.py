#!/usr/bin/env python3
"""Measure mean per-estimate wall time versus training length.

Times only the estimation call (synthesis excluded) at a fixed mid-grid SNR
of 15 dB and writes one CSV row per (estimator, N).
"""

import sys

from twrn_cs.cli import cli_main

if __name__ == "__main__":
    args = sys.argv[1:]
    if not any(a == "--out" for a in args):
        args += ["--out", "timing.csv"]
    sys.exit(cli_main(["timing", *args]))
