"""Metaheuristic and reference solvers."""

from dataclasses import dataclass, field

import numpy as np

from .baselines import run_clca, run_coa
from .config import PROFILES, SolverConfig, solver_config_from_mapping
from .encoding import GeneBounds, Genes
from .exhaustive import exhaustive_solve
from .ga import run_iadgga
from .hybrid import run_adgga, run_fihas, run_ihas
from .pso import run_apso

ALGORITHMS = ("fihas", "ihas", "iadgga", "adgga", "apso", "clca", "coa", "exhaustive")


@dataclass
class Solution:
    algo: str
    assignment: object
    fitness: float
    trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    phase_boundary: int | None = None


def solve(scenario, algo, cfg=None, seed=0, *, grid_points=3):
    """Dispatch ``algo`` and return a :class:`Solution`."""
    cfg = (cfg or SolverConfig()).validate()
    if algo in ("fihas", "ihas"):
        r = (run_fihas if algo == "fihas" else run_ihas)(scenario, cfg, seed)
        return Solution(algo, r.best.assignment(0, scenario), r.best_fitness, r.trace, cfg.T1)
    if algo in ("iadgga", "adgga"):
        r = (run_iadgga if algo == "iadgga" else run_adgga)(scenario, cfg, seed)
        return Solution(algo, r.best.assignment(0, scenario), r.best_fitness, r.trace)
    if algo == "apso":
        # PSO alone, started from a fresh random population
        from ..rng import Streams
        from .encoding import random_genes

        st = Streams(seed)
        pop = random_genes(scenario, cfg.I, st["init"])
        r = run_apso(scenario, cfg, pop, None, seed, streams=st)
        return Solution(algo, r.best.assignment(0, scenario), r.best_fitness, r.trace)
    if algo in ("clca", "coa"):
        r = (run_clca if algo == "clca" else run_coa)(scenario, cfg.penalties)
        return Solution(algo, r.assignment, r.report.fitness)
    if algo == "exhaustive":
        r = exhaustive_solve(scenario, grid_points, cfg.penalties)
        return Solution(algo, r.assignment(scenario), r.best_fitness)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


__all__ = [
    "ALGORITHMS", "PROFILES", "GeneBounds", "Genes", "Solution", "SolverConfig",
    "exhaustive_solve", "run_adgga", "run_apso", "run_clca", "run_coa", "run_fihas",
    "run_iadgga", "run_ihas", "solve", "solver_config_from_mapping",
]
