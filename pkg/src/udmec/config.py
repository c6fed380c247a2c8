"""Scenario configuration, unit conventions and config-file loading."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Mapping

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

# 1 MB = 2**20 bytes
BITS_PER_MB = 8 * 2**20
MCYCLES = 1e6
# lower bound for local capacity and transmit power (avoids zero division)
VARTHETA = 1e-20


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field_name, message):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


def dbm_to_watt(dbm):
    return 10.0 ** (dbm / 10.0) / 1000.0


def _check_range(name, rng, positive=True):
    lo, hi = rng
    if lo > hi:
        raise ConfigError(name, f"lower bound {lo} exceeds upper bound {hi}")
    if positive and lo <= 0:
        raise ConfigError(name, f"bounds must be positive, got {rng}")


@dataclass(frozen=True)
class SlopeParams:
    """Multi-slope LoS/NLoS pathloss parameters, one entry per slope.

    ``thresholds[j]`` is the LoS distance threshold of slope ``j`` (meters).
    The first ``J - 1`` thresholds also form the distance ladder that picks
    the active slope.
    """

    h_ls_ref: tuple = (10**-10.38, 10**-10.38)
    h_nls_ref: tuple = (10**-14.54, 10**-14.54)
    gamma_ls: tuple = (2.09, 2.09)
    gamma_nls: tuple = (3.75, 3.75)
    thresholds: tuple = (300.0, 300.0)

    @property
    def J(self):
        return len(self.thresholds)

    def validate(self):
        J = self.J
        if J < 1:
            raise ConfigError("slope_params", "need at least one slope")
        for name in ("h_ls_ref", "h_nls_ref", "gamma_ls", "gamma_nls"):
            vals = getattr(self, name)
            if len(vals) != J:
                raise ConfigError(f"slope_params.{name}", f"expected {J} entries, got {len(vals)}")
        for name in ("h_ls_ref", "h_nls_ref", "thresholds"):
            if any(v <= 0 for v in getattr(self, name)):
                raise ConfigError(f"slope_params.{name}", "entries must be positive")
        for name in ("gamma_ls", "gamma_nls"):
            if any(v < 2 for v in getattr(self, name)):
                raise ConfigError(f"slope_params.{name}", "pathloss exponents must be >= 2")
        ladder = self.thresholds[:-1]
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("slope_params.thresholds", "ladder thresholds must be strictly increasing")


@dataclass(frozen=True)
class TaskRanges:
    """Uniform draw ranges for task attributes, in the units named by each field."""

    d_mb: tuple = (0.01, 0.05)
    ell_mcycles: tuple = (10.0, 50.0)
    tau_max_s: tuple = (1.0, 3.0)
    rho: tuple = (3, 6)
    theta: tuple = (1.0, 3.0)
    lam_usd: tuple = (5e3, 10e3)

    def validate(self):
        for f in dataclasses.fields(self):
            _check_range(f"task_ranges.{f.name}", getattr(self, f.name))
        lo, hi = self.rho
        if int(lo) != lo or int(hi) != hi:
            raise ConfigError("task_ranges.rho", "security levels must be integers")


# Per-algorithm crypto costs: encrypt / decrypt cycles per bit, energy per bit.
DEFAULT_ENC_CYCLES = (100.0, 200.0, 250.0, 300.0, 350.0, 1050.0)
DEFAULT_DEC_CYCLES = (90.0, 280.0, 350.0, 300.0, 400.0, 1700.0)
DEFAULT_ENERGY_PER_BIT = tuple(
    v * 1e-7 for v in (2.5296, 5.0425, 6.837, 7.8528, 8.7073, 26.3643)
)


@dataclass(frozen=True)
class ScenarioConfig:
    region_side_m: float = 500.0
    N: int = 30
    K: int = 20
    M: int = 3
    Q: int = 5
    W: float = 20e6
    w: float = 2e6
    L: int = 6
    r_bh: float = 100e6
    f_mmax: float = 20e9
    f_lmax_range: tuple = (1e9, 2e9)
    p_max_dbm: float = 23.0
    noise_psd_dbm_hz: float = -174.0
    alpha: float = 1e-24
    slope_params: SlopeParams = field(default_factory=SlopeParams)
    task_ranges: TaskRanges = field(default_factory=TaskRanges)
    cache_capacity_per_bs: int = 10
    zipf_exponent: float = 0.8
    psi_max: float = 100.0
    enc_cycles: tuple = DEFAULT_ENC_CYCLES
    dec_cycles: tuple = DEFAULT_DEC_CYCLES
    energy_per_bit: tuple = DEFAULT_ENERGY_PER_BIT
    los_mode: str = "sample"
    seed: int = 0

    def validate(self):
        for name in ("N", "K", "M", "Q", "L"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(name, "must be >= 1")
        if self.Q > self.N:
            raise ConfigError("Q", f"cluster count {self.Q} exceeds BS count {self.N}")
        for name in ("region_side_m", "W", "w", "r_bh", "f_mmax", "alpha"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be positive")
        if self.W < self.w * self.Q:
            raise ConfigError("W", f"bandwidth {self.W} below w*Q = {self.w * self.Q}")
        _check_range("f_lmax_range", self.f_lmax_range)
        if self.cache_capacity_per_bs < 0:
            raise ConfigError("cache_capacity_per_bs", "must be >= 0")
        if self.zipf_exponent < 0:
            raise ConfigError("zipf_exponent", "must be >= 0")
        if self.psi_max < 0:
            raise ConfigError("psi_max", "must be >= 0")
        if self.los_mode not in ("sample", "expected"):
            raise ConfigError("los_mode", "must be 'sample' or 'expected'")
        for name in ("enc_cycles", "dec_cycles", "energy_per_bit"):
            vals = getattr(self, name)
            if len(vals) < self.L:
                raise ConfigError(name, f"needs at least L={self.L} entries, got {len(vals)}")
            if any(v <= 0 for v in vals[: self.L]):
                raise ConfigError(name, "entries must be positive")
        self.slope_params.validate()
        self.task_ranges.validate()
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed", "must fit in 64 bits")
        return self

    @property
    def p_max_w(self):
        return dbm_to_watt(self.p_max_dbm)

    @property
    def noise_power_w(self):
        """Noise power over one subchannel, watts."""
        return dbm_to_watt(self.noise_psd_dbm_hz) * self.w

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _tupleize(value):
    if isinstance(value, list):
        return tuple(_tupleize(v) for v in value)
    return value


def scenario_config_from_mapping(data: Mapping[str, Any], base: ScenarioConfig | None = None):
    """Build a ``ScenarioConfig`` from flat keys, rejecting unknown ones."""
    base = base or ScenarioConfig()
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    changes = {}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(key, "unknown scenario key")
        if key == "slope_params":
            changes[key] = SlopeParams(**{k: _tupleize(v) for k, v in value.items()})
        elif key == "task_ranges":
            tr = dataclasses.asdict(base.task_ranges)
            for k, v in value.items():
                if k not in tr:
                    raise ConfigError(f"task_ranges.{k}", "unknown task range")
                tr[k] = _tupleize(v)
            changes[key] = TaskRanges(**tr)
        else:
            changes[key] = _tupleize(value)
    return dataclasses.replace(base, **changes)


def load_config_file(path):
    """Read a TOML key/value file into ``(scenario, solver, experiment)`` dicts.

    Scenario keys live at top level, solver keys under ``solver.*`` and
    harness keys under ``experiment.*``.
    """
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    solver = data.pop("solver", {})
    experiment = data.pop("experiment", {})
    return data, solver, experiment
