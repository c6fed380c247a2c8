"""GA-then-PSO pipelines (FIHAS and the IHAS baseline)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..rng import Streams
from .ga import GAResult, run_iadgga
from .pso import PSOResult, run_apso


@dataclass
class HybridResult:
    best: object
    best_fitness: float
    trace: np.ndarray  # length T1 + T2; the PSO phase starts at index T1
    ga: GAResult
    pso: PSOResult


def seed_population(ga):
    """GA's final population with its historical best in place of the worst member."""
    pop, fit = ga.population.copy(), ga.fitness.copy()
    if not pop.equal_rows(ga.best).any():
        worst = int(np.argmin(fit))
        pop.put(np.array([worst]), ga.best)
        fit[worst] = ga.best_fitness
    return pop, fit


def run_fihas(scenario, cfg, seed, *, callback=None):
    cfg = cfg.validate()
    st = Streams(seed)
    ga = run_iadgga(scenario, cfg, seed, streams=st, callback=callback)
    pop, fit = seed_population(ga)
    offset = cfg.T1

    def pso_cb(t, g):
        if callback is not None:
            callback(offset + t, g)

    pso = run_apso(scenario, cfg, pop, fit, seed, streams=st, callback=pso_cb)
    if cfg.T2 and pso.best_fitness >= ga.best_fitness:
        best, best_fit = pso.best, pso.best_fitness
    else:
        best, best_fit = ga.best, ga.best_fitness
    trace = np.concatenate([ga.trace, pso.trace])
    return HybridResult(best, best_fit, trace, ga, pso)


def ihas_config(cfg):
    """Baseline flags: linear GA schedules and no elimination, PSO phase kept."""
    return cfg.replace(adaptive_probs=False, elimination=False)


def run_ihas(scenario, cfg, seed, **kw):
    return run_fihas(scenario, ihas_config(cfg), seed, **kw)


def run_adgga(scenario, cfg, seed, **kw):
    return run_iadgga(scenario, ihas_config(cfg), seed, **kw)
