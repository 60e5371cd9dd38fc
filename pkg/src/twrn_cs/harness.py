"""Monte Carlo experiment driver: SNR sweeps, timing sweeps, CSV emission.

Every trial owns a random stream derived from (master_seed, N, snr_db,
trial_index), so results are pure functions of the configuration and are
identical under serial and parallel execution.  Aggregation sums per-trial
squared errors in trial-index order for bit-stable output.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import compose_channels, random_sparse_channel
from .config import SimConfig, fmt_float
from .estimators import (
    CosampFailure,
    CosampSettings,
    RipReport,
    cosamp,
    default_sparsity,
    ls_estimate,
    oracle_estimate,
    restricted_isometry_constant,
)
from .linalg import RankDeficiencyError, as_complex_vector
from .link import (
    MeasurementModel,
    amplification_factor,
    build_measurement,
    random_training_pair,
    synthesize_received,
)

# Relay noise variance entering the amplification factor; the absolute noise
# level is set per trial by the SNR calibration, this only fixes alpha.
RELAY_NOISE_VARIANCE = 1.0

_ESTIMATOR_FAILURES = (RankDeficiencyError, CosampFailure, np.linalg.LinAlgError)


@dataclass(frozen=True)
class TrialOutcome:
    """One estimator's result on one synthesized trial."""

    estimator: str
    sq_err_b: float
    sq_err_c: float
    elapsed_seconds: float
    failed: bool


@dataclass(frozen=True)
class CurvePoint:
    snr_db: float
    mse_b: float
    mse_c: float
    mean_seconds: float
    trials: int      # successful trials; trials + failures == configured M
    failures: int


@dataclass(frozen=True)
class MseCurve:
    estimator: str
    N: int
    points: tuple[CurvePoint, ...]


@dataclass(frozen=True)
class TimingEntry:
    estimator: str
    N: int
    mean_seconds: float
    trials: int
    failures: int


def mse(true_vec, estimates) -> float:
    """Mean square error ``sum_m ||true - est_m||^2 / (M * len(true))``."""
    true_vec = as_complex_vector(true_vec, "true_vec")
    if true_vec.size == 0:
        raise ValueError("true_vec must be nonempty")
    if not estimates:
        raise ValueError("estimates must be nonempty")
    total = 0.0
    for est in estimates:
        est = as_complex_vector(est, "estimate")
        if est.size != true_vec.size:
            raise ValueError(f"estimate length {est.size} != {true_vec.size}")
        total += float(np.sum(np.abs(true_vec - est) ** 2))
    return total / (len(estimates) * true_vec.size)


def _snr_seed_key(snr_db: float) -> int:
    if math.isinf(snr_db):
        return 2**32 - 1
    return int(round(snr_db * 1000.0)) % 2**63


def trial_rng(master_seed: int, train_len: int, snr_db: float, trial_index: int) -> np.random.Generator:
    """Random stream owned by one trial, derived from its coordinates."""
    return np.random.default_rng(
        [master_seed % 2**64, train_len, _snr_seed_key(snr_db), trial_index]
    )


def run_trial(cfg: SimConfig, train_len: int, snr_db: float, trial_index: int) -> list[TrialOutcome]:
    """Synthesize one trial and run every configured estimator on it.

    Draw order within the trial stream: h1, h2, training pair, noise.  A
    failing estimator is charged the all-zero estimate's error and excluded
    from timing.
    """
    if trial_index >= cfg.trials:
        raise ValueError(f"trial_index {trial_index} >= trials {cfg.trials}")
    rng = trial_rng(cfg.master_seed, train_len, snr_db, trial_index)
    h1 = random_sparse_channel(cfg.L, cfg.K, rng)
    h2 = random_sparse_channel(cfg.L, cfg.K, rng)
    pair = random_training_pair(train_len, rng)
    alpha = amplification_factor(cfg.P1, cfg.P2, cfg.Pr, 1.0, 1.0, RELAY_NOISE_VARIANCE)
    model = build_measurement(pair.x1, pair.x2, cfg.L, alpha)
    comp = compose_channels(h1, h2)
    sig = synthesize_received(model, comp, h1, snr_db, rng)

    half = 2 * cfg.L - 1
    outcomes = []
    for name in cfg.estimators:
        try:
            if name == "ls":
                out = ls_estimate(model, sig.y)
            elif name == "oracle":
                out = oracle_estimate(model, sig.y, comp.support)
            elif name == "cosamp":
                out = cosamp(model, sig.y, cfg.cosamp)
            else:
                raise ValueError(f"unknown estimator {name!r}")
        except _ESTIMATOR_FAILURES:
            outcomes.append(TrialOutcome(
                estimator=name,
                sq_err_b=float(np.sum(np.abs(comp.b) ** 2)),
                sq_err_c=float(np.sum(np.abs(comp.c) ** 2)),
                elapsed_seconds=0.0,
                failed=True,
            ))
            continue
        b_hat = out.theta_hat[:half]
        c_hat = out.theta_hat[half:]
        outcomes.append(TrialOutcome(
            estimator=name,
            sq_err_b=float(np.sum(np.abs(comp.b - b_hat) ** 2)),
            sq_err_c=float(np.sum(np.abs(comp.c - c_hat) ** 2)),
            elapsed_seconds=out.elapsed_seconds,
            failed=False,
        ))
    return outcomes


def _run_trial_star(args) -> list[TrialOutcome]:
    return run_trial(*args)


def _run_point(cfg: SimConfig, train_len: int, snr_db: float, workers: int) -> dict[str, CurvePoint]:
    """Aggregate all trials of one (N, snr) point, in trial-index order."""
    args = [(cfg, train_len, snr_db, t) for t in range(cfg.trials)]
    if workers <= 1:
        per_trial = [run_trial(*a) for a in args]
    else:
        chunk = max(1, cfg.trials // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = list(pool.map(_run_trial_star, args, chunksize=chunk))

    half = 2 * cfg.L - 1
    stats = {
        name: {"sq_b": 0.0, "sq_c": 0.0, "seconds": 0.0, "ok": 0, "failed": 0}
        for name in cfg.estimators
    }
    for outcomes in per_trial:
        for out in outcomes:
            acc = stats[out.estimator]
            acc["sq_b"] += out.sq_err_b
            acc["sq_c"] += out.sq_err_c
            if out.failed:
                acc["failed"] += 1
            else:
                acc["ok"] += 1
                acc["seconds"] += out.elapsed_seconds
    points = {}
    for name, acc in stats.items():
        denom = cfg.trials * half
        points[name] = CurvePoint(
            snr_db=snr_db,
            mse_b=acc["sq_b"] / denom,
            mse_c=acc["sq_c"] / denom,
            mean_seconds=acc["seconds"] / acc["ok"] if acc["ok"] else 0.0,
            trials=acc["ok"],
            failures=acc["failed"],
        )
    return points


def mse_sweep(cfg: SimConfig, workers: int = 1, progress=None) -> list[MseCurve]:
    """MSE of every configured estimator over the (N, SNR) grid.

    Returns one curve per (estimator, N), sorted by (estimator, N), each with
    points in SNR-grid order.
    """
    cfg.validate()
    collected: dict[tuple[str, int], list[CurvePoint]] = {
        (name, n): [] for name in cfg.estimators for n in cfg.training_lengths
    }
    for n in cfg.training_lengths:
        for snr_db in cfg.snr_grid_db:
            points = _run_point(cfg, n, snr_db, workers)
            for name, point in points.items():
                collected[(name, n)].append(point)
            if progress is not None:
                summary = " ".join(
                    f"{name}:mse_b={points[name].mse_b:.3e}" for name in cfg.estimators
                )
                progress(f"N={n} snr={fmt_float(snr_db)}dB {summary}")
    curves = [
        MseCurve(estimator=name, N=n, points=tuple(points))
        for (name, n), points in collected.items()
    ]
    curves.sort(key=lambda c: (c.estimator, c.N))
    return curves


def timing_sweep(cfg: SimConfig, snr_db: float = 15.0, workers: int = 1, progress=None) -> list[TimingEntry]:
    """Mean per-estimate wall time for each estimator and training length.

    Runs at one fixed SNR (mid grid by default); synthesis time is excluded,
    only the estimation call is measured.
    """
    cfg.validate()
    entries = []
    for n in cfg.training_lengths:
        points = _run_point(cfg, n, snr_db, workers)
        for name in cfg.estimators:
            point = points[name]
            entries.append(TimingEntry(
                estimator=name, N=n,
                mean_seconds=point.mean_seconds,
                trials=point.trials, failures=point.failures,
            ))
            if progress is not None:
                progress(f"N={n} {name}: mean {point.mean_seconds * 1e3:.3f} ms")
    entries.sort(key=lambda e: (e.estimator, e.N))
    return entries


# The MSE file must be byte-identical for identical (config, seed) under any
# degree of parallelism, so it carries no wall-clock measurements; timing data
# lives in the timing sweep's own file.
MSE_CSV_COLUMNS = "estimator,N,snr_db,mse_b,mse_c,trials,failures"
TIMING_CSV_COLUMNS = "estimator,N,mean_seconds,trials,failures"


def render_mse_csv(cfg: SimConfig, curves: list[MseCurve]) -> str:
    lines = ["# twrn-cs mse sweep"]
    lines += [f"# {entry}" for entry in cfg.header_lines()]
    lines.append(MSE_CSV_COLUMNS)
    for curve in curves:
        for pt in curve.points:
            lines.append(",".join([
                curve.estimator,
                str(curve.N),
                fmt_float(pt.snr_db),
                fmt_float(pt.mse_b),
                fmt_float(pt.mse_c),
                str(pt.trials),
                str(pt.failures),
            ]))
    return "\n".join(lines) + "\n"


def render_timing_csv(cfg: SimConfig, entries: list[TimingEntry], snr_db: float) -> str:
    lines = ["# twrn-cs timing sweep", f"# timing_snr_db = {fmt_float(snr_db)}"]
    lines += [f"# {entry}" for entry in cfg.header_lines()]
    lines.append(TIMING_CSV_COLUMNS)
    for entry in entries:
        lines.append(",".join([
            entry.estimator,
            str(entry.N),
            fmt_float(entry.mean_seconds),
            str(entry.trials),
            str(entry.failures),
        ]))
    return "\n".join(lines) + "\n"


def write_text(path: str, content: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)


# ---------------------------------------------------------------------------
# Self test and RIC inspection entry points (shared by the CLI and tests)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelfTestReport:
    """Noiseless exact-recovery statistics over seeded instances."""

    instances: int
    cosamp_hits: int     # relative error <= 1e-6
    ls_hits: int         # relative error <= 1e-9
    oracle_hits: int     # relative error <= 1e-9
    max_cosamp_rel_err: float
    max_ls_rel_err: float
    max_oracle_rel_err: float
    elapsed_seconds: float

    @property
    def passed(self) -> bool:
        return (
            self.cosamp_hits >= math.ceil(0.99 * self.instances)
            and self.ls_hits == self.instances
            and self.oracle_hits == self.instances
        )


def noiseless_selftest(
    instances: int = 200,
    master_seed: int = 0,
    train_len: int = 40,
    channel_len: int = 16,
    channel_sparsity: int = 2,
    sparsity: int | None = None,
) -> SelfTestReport:
    """Exact-recovery check of all three estimators on noiseless instances."""
    if instances < 1:
        raise ValueError("instances must be >= 1")
    settings = CosampSettings(
        sparsity=sparsity if sparsity is not None else default_sparsity(channel_sparsity)
    )
    alpha = amplification_factor(1.0, 1.0, 1.0, 1.0, 1.0, RELAY_NOISE_VARIANCE)
    start = time.perf_counter()
    cosamp_hits = ls_hits = oracle_hits = 0
    max_cs = max_ls = max_or = 0.0
    for index in range(instances):
        rng = np.random.default_rng([master_seed % 2**64, 918273, index])
        h1 = random_sparse_channel(channel_len, channel_sparsity, rng)
        h2 = random_sparse_channel(channel_len, channel_sparsity, rng)
        pair = random_training_pair(train_len, rng)
        model = build_measurement(pair.x1, pair.x2, channel_len, alpha)
        comp = compose_channels(h1, h2)
        sig = synthesize_received(model, comp, h1, math.inf, rng, noiseless=True)
        theta_norm = float(np.linalg.norm(comp.theta))

        rel_cs = float(np.linalg.norm(
            cosamp(model, sig.y, settings).theta_hat - comp.theta
        )) / theta_norm
        rel_ls = float(np.linalg.norm(
            ls_estimate(model, sig.y).theta_hat - comp.theta
        )) / theta_norm
        rel_or = float(np.linalg.norm(
            oracle_estimate(model, sig.y, comp.support).theta_hat - comp.theta
        )) / theta_norm

        cosamp_hits += rel_cs <= 1e-6
        ls_hits += rel_ls <= 1e-9
        oracle_hits += rel_or <= 1e-9
        max_cs = max(max_cs, rel_cs)
        max_ls = max(max_ls, rel_ls)
        max_or = max(max_or, rel_or)
    return SelfTestReport(
        instances=instances,
        cosamp_hits=cosamp_hits,
        ls_hits=ls_hits,
        oracle_hits=oracle_hits,
        max_cosamp_rel_err=max_cs,
        max_ls_rel_err=max_ls,
        max_oracle_rel_err=max_or,
        elapsed_seconds=time.perf_counter() - start,
    )


def ric_report_for_training(
    train_len: int, channel_len: int, order: int, master_seed: int = 0
) -> tuple[MeasurementModel, RipReport]:
    """Generate a random training measurement matrix and brute-force its RIC."""
    rng = np.random.default_rng([master_seed % 2**64, 557731])
    pair = random_training_pair(train_len, rng)
    alpha = amplification_factor(1.0, 1.0, 1.0, 1.0, 1.0, RELAY_NOISE_VARIANCE)
    model = build_measurement(pair.x1, pair.x2, channel_len, alpha)
    return model, restricted_isometry_constant(model.X, order)
