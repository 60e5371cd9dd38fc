"""Experiment configuration: defaults, validation, and flat key=value files.

Config files are UTF-8 text, one ``key = value`` pair per line, ``#`` starts
a comment.  List values are comma separated.  The greedy-estimator settings
use dotted keys (``cosamp.S``, ``cosamp.max_iter``, ``cosamp.tol``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .estimators import CosampSettings, default_sparsity

KNOWN_ESTIMATORS = ("ls", "oracle", "cosamp")


@dataclass
class SimConfig:
    """All experiment knobs with the standard defaults."""

    L: int = 16
    K: int = 2
    training_lengths: tuple[int, ...] = (40, 60, 80)
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    trials: int = 1000
    P1: float = 1.0
    P2: float = 1.0
    Pr: float = 1.0
    estimators: tuple[str, ...] = KNOWN_ESTIMATORS
    cosamp: CosampSettings | None = None
    master_seed: int = 0
    output_path: str = ""

    def __post_init__(self):
        self.validate()
        if self.cosamp is None:
            self.cosamp = CosampSettings(sparsity=default_sparsity(self.K))

    def validate(self):
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if not 1 <= self.K <= self.L:
            raise ValueError(f"K must satisfy 1 <= K <= L, got K={self.K}, L={self.L}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.training_lengths:
            raise ValueError("training_lengths must be nonempty")
        for n in self.training_lengths:
            # N_tilde = N + 2L - 2 must cover the 4L - 2 unknowns.
            if n < 2 * self.L:
                raise ValueError(
                    f"training length {n} < 2L = {2 * self.L}: least squares unsolvable"
                )
        if not self.snr_grid_db:
            raise ValueError("snr_grid_db must be nonempty")
        for name in self.estimators:
            if name not in KNOWN_ESTIMATORS:
                raise ValueError(f"unknown estimator {name!r}, expected one of {KNOWN_ESTIMATORS}")
        if not self.estimators:
            raise ValueError("estimators must be nonempty")
        if len(set(self.estimators)) != len(self.estimators):
            raise ValueError("estimators must not repeat")
        for name, value in (("P1", self.P1), ("P2", self.P2), ("Pr", self.Pr)):
            if not value > 0:
                raise ValueError(f"{name} must be > 0")

    def header_lines(self) -> list[str]:
        """Fully resolved config plus the simulation conventions, for file headers."""
        return [
            f"L = {self.L}",
            f"K = {self.K}",
            f"training_lengths = {','.join(str(n) for n in self.training_lengths)}",
            f"snr_grid_db = {','.join(fmt_float(s) for s in self.snr_grid_db)}",
            f"trials = {self.trials}",
            f"P1 = {fmt_float(self.P1)}",
            f"P2 = {fmt_float(self.P2)}",
            f"Pr = {fmt_float(self.Pr)}",
            f"estimators = {','.join(self.estimators)}",
            f"cosamp.S = {self.cosamp.sparsity}",
            f"cosamp.max_iter = {self.cosamp.max_iterations}",
            f"cosamp.tol = {fmt_float(self.cosamp.residual_tolerance)}",
            f"master_seed = {self.master_seed}",
            "convention: training power ||x||^2 = N (unit per-symbol power)",
            "convention: snr_db = 10*log10(||alpha*X@theta||^2 / E||noise||^2) at the receiving terminal",
            "convention: alpha uses unit channel variances and unit relay noise variance",
        ]


def fmt_float(x: float) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.15g}"


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"config key {key!r}: expected integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"config key {key!r}: expected number, got {raw!r}") from None


def parse_config(text: str) -> SimConfig:
    """Build a SimConfig from flat key=value text; unknown keys are rejected."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"config line {lineno}: expected key = value, got {line!r}")
        key, raw = stripped.split("=", 1)
        values[key.strip()] = raw.strip()

    kwargs = {}
    cosamp_kwargs = {}
    for key, raw in values.items():
        if key == "L":
            kwargs["L"] = _parse_int(key, raw)
        elif key == "K":
            kwargs["K"] = _parse_int(key, raw)
        elif key == "training_lengths":
            kwargs["training_lengths"] = tuple(
                _parse_int(key, item.strip()) for item in raw.split(",") if item.strip()
            )
        elif key == "snr_grid_db":
            kwargs["snr_grid_db"] = tuple(
                _parse_float(key, item.strip()) for item in raw.split(",") if item.strip()
            )
        elif key == "trials":
            kwargs["trials"] = _parse_int(key, raw)
        elif key in ("P1", "P2", "Pr"):
            kwargs[key] = _parse_float(key, raw)
        elif key == "estimators":
            kwargs["estimators"] = tuple(
                item.strip() for item in raw.split(",") if item.strip()
            )
        elif key == "master_seed":
            kwargs["master_seed"] = _parse_int(key, raw)
        elif key == "output_path":
            kwargs["output_path"] = raw
        elif key == "cosamp.S":
            cosamp_kwargs["sparsity"] = _parse_int(key, raw)
        elif key == "cosamp.max_iter":
            cosamp_kwargs["max_iterations"] = _parse_int(key, raw)
        elif key == "cosamp.tol":
            cosamp_kwargs["residual_tolerance"] = _parse_float(key, raw)
        else:
            raise ValueError(f"unknown config key {key!r}")

    if cosamp_kwargs:
        if "sparsity" not in cosamp_kwargs:
            cosamp_kwargs["sparsity"] = default_sparsity(kwargs.get("K", SimConfig.K))
        kwargs["cosamp"] = CosampSettings(**cosamp_kwargs)
    return SimConfig(**kwargs)


def load_config(path: str) -> SimConfig:
    """Read and parse a config file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_overrides(cfg: SimConfig, *, master_seed: int | None = None,
                   trials: int | None = None, output_path: str | None = None) -> SimConfig:
    """Copy of the config with CLI-level overrides applied (and revalidated)."""
    updates = {}
    if master_seed is not None:
        updates["master_seed"] = master_seed
    if trials is not None:
        updates["trials"] = trials
    if output_path is not None:
        updates["output_path"] = output_path
    if not updates:
        return cfg
    return replace(cfg, **updates)
