"""Command line front end.

Subcommands:
  mse       MSE-vs-SNR sweep over the configured training lengths (CSV out)
  timing    mean per-estimate wall time per training length (CSV out)
  ric       brute-force restricted isometry constant of a generated training matrix
  selftest  noiseless exact-recovery suite for all three estimators

Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import SimConfig, load_config, with_overrides
from .harness import (
    mse_sweep,
    noiseless_selftest,
    render_mse_csv,
    render_timing_csv,
    ric_report_for_training,
    timing_sweep,
    write_text,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract wants 1.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="default",
                        help="config file path, or 'default' for built-in defaults")
    common.add_argument("--seed", type=int, default=None, help="override master_seed")
    common.add_argument("--out", default=None, help="override output path")
    common.add_argument("--trials", type=int, default=None, help="override trial count")
    common.add_argument("--workers", type=int, default=1,
                        help="parallel trial workers (results are identical for any value)")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = _Parser(prog="twrn-cs", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mse", parents=[common], help="run the MSE-vs-SNR sweep")

    timing = sub.add_parser("timing", parents=[common], help="run the timing sweep")
    timing.add_argument("--snr", type=float, default=15.0,
                        help="SNR (dB) at which timing is measured")

    ric = sub.add_parser("ric", parents=[common],
                         help="restricted isometry constant of a generated training matrix")
    ric.add_argument("--train-len", type=int, default=2, help="training sequence length N")
    ric.add_argument("--channel-len", type=int, default=3, help="channel length L")
    ric.add_argument("--order", type=int, default=2, help="isometry order S")

    selftest = sub.add_parser("selftest", parents=[common],
                              help="noiseless exact-recovery suite")
    selftest.add_argument("--instances", type=int, default=200,
                          help="number of seeded noiseless instances")
    return parser


def _resolve_config(args) -> SimConfig:
    if args.config == "default":
        cfg = SimConfig()
    else:
        cfg = load_config(args.config)
    return with_overrides(cfg, master_seed=args.seed, trials=args.trials,
                          output_path=args.out)


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1

    say = (lambda *a, **k: None) if args.quiet else print
    try:
        cfg = _resolve_config(args)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1

    try:
        if args.command == "mse":
            curves = mse_sweep(cfg, workers=args.workers,
                               progress=None if args.quiet else say)
            out = cfg.output_path or "mse.csv"
            write_text(out, render_mse_csv(cfg, curves))
            say(f"wrote {out}")
            return 0

        if args.command == "timing":
            entries = timing_sweep(cfg, snr_db=args.snr, workers=args.workers,
                                   progress=None if args.quiet else say)
            out = cfg.output_path or "timing.csv"
            write_text(out, render_timing_csv(cfg, entries, args.snr))
            say(f"wrote {out}")
            return 0

        if args.command == "ric":
            model, report = ric_report_for_training(
                args.train_len, args.channel_len, args.order, cfg.master_seed
            )
            print(f"matrix: {model.N_tilde} x {model.X.shape[1]} "
                  f"(N={model.N}, L={model.L})")
            print(f"order: {report.order}")
            print(f"delta: {report.delta:.15g}")
            print(f"extremal_subset: {','.join(str(i) for i in report.extremal_subset)}")
            print(f"subsets_examined: {report.subsets_examined}")
            return 0

        if args.command == "selftest":
            report = noiseless_selftest(instances=args.instances,
                                        master_seed=cfg.master_seed)
            say(f"instances: {report.instances}")
            say(f"cosamp hits (rel err <= 1e-6): {report.cosamp_hits} "
                f"(max rel err {report.max_cosamp_rel_err:.3e})")
            say(f"ls hits (rel err <= 1e-9): {report.ls_hits} "
                f"(max rel err {report.max_ls_rel_err:.3e})")
            say(f"oracle hits (rel err <= 1e-9): {report.oracle_hits} "
                f"(max rel err {report.max_oracle_rel_err:.3e})")
            say(f"elapsed: {report.elapsed_seconds:.2f} s")
            print("selftest: PASS" if report.passed else "selftest: FAIL")
            return 0 if report.passed else 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {err}", file=sys.stderr)
        return 2
    return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
