"""Metaheuristic hyperparameters."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..config import ConfigError
from ..sysmodel import PenaltyConfig


@dataclass(frozen=True)
class SolverConfig:
    I: int = 60
    T1: int = 5000
    T2: int = 3000
    # crossover curve (max, min, smoothing)
    hbar1: float = 0.8
    hbar2: float = 0.3
    hbar3: float = 0.1
    # mutation curve
    hbar4: float = 2.5
    hbar5: float = 0.01
    hbar6: float = 0.993
    # diversity-guided mutation levels
    hbar7: float = 0.6
    hbar8: float = 0.03
    hbar9: float = 1e-5
    mu1: float = 0.01
    mu2: float = 0.25
    mu3: float = 0.5
    mu4: int = 15
    mu5: int = 5
    kappa3: float = 2.0
    kappa4: float = 2.0
    kappa5: float = 2.0
    omega_max: float = 0.9
    omega_min: float = 0.4
    omega_dot0: float = 1.0
    # GCPSO perturbation span for f/p genes, as a fraction of the box width
    gc_continuous_scale: float = 0.05
    elimination_start_fraction: float = 0.2
    # linear schedules used when adaptive_probs is off
    linear_mut_base: float = 0.01
    linear_mut_slope: float = 0.09
    adaptive_probs: bool = True
    elimination: bool = True
    gcpso: bool = True
    mirrored_crossover: bool = False
    literal_eq39: bool = False
    eta: float = 1e3
    eta_tilde: float = 1e3

    def validate(self):
        if self.I < 2 or self.I % 2:
            raise ConfigError("I", "population size must be even and >= 2")
        if self.T1 < 1:
            raise ConfigError("T1", "must be >= 1")
        if self.T2 < 0:
            raise ConfigError("T2", "must be >= 0")
        if not self.omega_min <= self.omega_max:
            raise ConfigError("omega_min", "must not exceed omega_max")
        if not self.mu1 <= self.mu2:
            raise ConfigError("mu1", "must not exceed mu2")
        if self.eta <= 0 or self.eta_tilde <= 0:
            raise ConfigError("eta", "penalty weights must be positive")
        if self.gc_continuous_scale <= 0:
            raise ConfigError("gc_continuous_scale", "must be positive")
        return self

    @property
    def penalties(self):
        return PenaltyConfig(self.eta, self.eta_tilde)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


PROFILES = {
    "desk": dict(I=30, T1=300, T2=200),
    "paper": dict(I=60, T1=5000, T2=3000),
}


def solver_config_from_mapping(data, base=None):
    base = base or SolverConfig()
    known = {f.name for f in dataclasses.fields(SolverConfig)}
    for key in data:
        if key not in known:
            raise ConfigError(f"solver.{key}", "unknown solver key")
    return dataclasses.replace(base, **dict(data)).validate()
