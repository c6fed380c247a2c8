"""Experiment runner: sweeps, convergence traces and the tiny-instance oracle.

Output files are deterministic for a given spec: wall-clock timings are kept
out of the CSVs and written to ``timings.txt`` instead.
"""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig, TaskRanges, scenario_config_from_mapping
from .scenario import generate_scenario
from .solvers import ALGORITHMS, SolverConfig, solve
from .solvers.config import PROFILES, solver_config_from_mapping
from .sysmodel import evaluate

SWEEP_PARAMS = ("K", "f_lmax", "mu3")
DEFAULT_SWEEPS = {
    "K": (10, 15, 20, 25, 30),
    "f_lmax": (1.0, 1.25, 1.5, 1.75, 2.0),  # GHz
    "mu3": (0.3, 0.5, 0.7, 0.9),
}
SCENARIO_PROFILES = {
    "desk": dict(N=10, K=8, M=2),
    "paper": dict(N=30, K=20, M=3),
}
RESULT_COLUMNS = (
    "sweep_param", "sweep_value", "seed", "algo",
    "tec", "td", "tsr", "csr", "best_fitness", "fitness_at_t1", "trace_file",
)


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    algorithms: tuple = ("fihas", "clca", "coa")
    seeds: tuple = (0,)
    sweep_param: str | None = None
    sweep_values: tuple = ()
    scenario: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    profile: str = "desk"
    out_dir: str | None = None
    write_traces: bool = True
    workers: int = 1

    def validate(self):
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise UsageError(f"unknown algorithm(s) {', '.join(bad)}; choose from {', '.join(ALGORITHMS)}")
        if not self.seeds:
            raise UsageError("at least one seed is required")
        if self.sweep_param is not None and self.sweep_param not in SWEEP_PARAMS:
            raise UsageError(f"unknown sweep parameter {self.sweep_param!r}; choose from {', '.join(SWEEP_PARAMS)}")
        if self.profile not in SCENARIO_PROFILES:
            raise UsageError(f"unknown profile {self.profile!r}")
        return self

    def base_scenario(self):
        return scenario_config_from_mapping({**SCENARIO_PROFILES[self.profile], **self.scenario})

    def base_solver(self):
        return solver_config_from_mapping({**PROFILES[self.profile], **self.solver})

    def cells(self):
        values = list(self.sweep_values) if self.sweep_param else [None]
        return [(v, s, a) for v in values for s in self.seeds for a in self.algorithms]


@dataclass
class RunResult:
    algo: str
    seed: int
    sweep_param: str
    sweep_value: float | None
    tec: float
    td: float
    tsr: float
    csr: float
    best_fitness: float
    fitness_at_t1: float
    wall_time: float
    trace: np.ndarray = field(repr=False, default=None)
    phase_boundary: int | None = None
    trace_file: str = ""


def apply_sweep(param, value, scen_cfg, solver_cfg):
    if param is None:
        return scen_cfg, solver_cfg
    if param == "K":
        return scen_cfg.replace(K=int(value)), solver_cfg
    if param == "f_lmax":
        hz = float(value) * 1e9
        return scen_cfg.replace(f_lmax_range=(hz, hz)), solver_cfg
    if param == "mu3":
        return scen_cfg, solver_cfg.replace(mu3=float(value))
    raise UsageError(f"unknown sweep parameter {param!r}")


def run_cell(spec, value, seed, algo):
    scen_cfg, solver_cfg = apply_sweep(spec.sweep_param, value, spec.base_scenario().replace(seed=int(seed)), spec.base_solver())
    scenario = generate_scenario(scen_cfg)
    t0 = time.perf_counter()
    sol = solve(scenario, algo, solver_cfg, seed=int(seed))
    wall = time.perf_counter() - t0
    rep = evaluate(scenario, sol.assignment, solver_cfg.penalties)
    at_t1 = float(sol.trace[sol.phase_boundary - 1]) if sol.phase_boundary else float(rep.fitness)
    return RunResult(
        algo=algo, seed=int(seed), sweep_param=spec.sweep_param or "",
        sweep_value=value, tec=rep.tec, td=rep.td, tsr=rep.tsr, csr=rep.csr,
        best_fitness=rep.fitness, fitness_at_t1=at_t1, wall_time=wall,
        trace=sol.trace, phase_boundary=sol.phase_boundary,
    )


def _run_cell_args(args):
    return run_cell(*args)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_trace(path, trace, phase_boundary=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if phase_boundary is None:
            w.writerow(("iteration", "best_fitness"))
            for i, g in enumerate(trace, 1):
                w.writerow((i, _fmt(float(g))))
        else:
            w.writerow(("iteration", "best_fitness", "phase"))
            for i, g in enumerate(trace, 1):
                w.writerow((i, _fmt(float(g)), "ga" if i <= phase_boundary else "pso"))


def write_results(path, results):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in results:
            w.writerow([_fmt(getattr(r, c)) for c in RESULT_COLUMNS])


def _sort_key(r):
    v = -np.inf if r.sweep_value is None else float(r.sweep_value)
    return (v, r.seed, r.algo)


def run_experiment(spec):
    """Run every (sweep value, seed, algorithm) cell; rows come back sorted by that key."""
    spec = spec.validate()
    cells = spec.cells()
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_run_cell_args, [(spec, *c) for c in cells]))
    else:
        results = [run_cell(spec, *c) for c in cells]
    results.sort(key=_sort_key)
    if spec.out_dir:
        os.makedirs(spec.out_dir, exist_ok=True)
        for r in results:
            if spec.write_traces and r.trace is not None and len(r.trace):
                tag = "" if r.sweep_value is None else f"_{spec.sweep_param}{_fmt(r.sweep_value)}"
                r.trace_file = f"trace_{r.algo}_{r.seed}{tag}.csv"
                write_trace(os.path.join(spec.out_dir, r.trace_file), r.trace)
        write_results(os.path.join(spec.out_dir, "results.csv"), results)
        with open(os.path.join(spec.out_dir, "timings.txt"), "w") as fh:
            for r in results:
                fh.write(f"{r.sweep_param}\t{_fmt(r.sweep_value)}\t{r.seed}\t{r.algo}\t{r.wall_time:.3f}\n")
    return results


def sweep_imd_density(spec, values=None):
    return run_experiment(_with_sweep(spec, "K", values))


def sweep_local_capacity(spec, values=None):
    return run_experiment(_with_sweep(spec, "f_lmax", values))


def sweep_similarity_threshold(spec, values=None):
    return run_experiment(_with_sweep(spec, "mu3", values))


def _with_sweep(spec, param, values):
    import dataclasses

    vals = tuple(values) if values is not None else (tuple(spec.sweep_values) if spec.sweep_param == param and spec.sweep_values else DEFAULT_SWEEPS[param])
    return dataclasses.replace(spec, sweep_param=param, sweep_values=vals)


def convergence_trace(spec):
    """FIHAS and IHAS traces over both phases, one file per algorithm and seed."""
    import dataclasses

    spec = dataclasses.replace(spec, algorithms=("fihas", "ihas"), sweep_param=None, sweep_values=(), write_traces=False)
    results = run_experiment(spec)
    if spec.out_dir:
        for r in results:
            r.trace_file = f"convergence_{r.algo}_{r.seed}.csv"
            write_trace(os.path.join(spec.out_dir, r.trace_file), r.trace, r.phase_boundary)
        write_results(os.path.join(spec.out_dir, "results.csv"), results)
    return results


def medians(results, metric):
    """``{(algo, sweep_value): median}`` over seeds."""
    groups = {}
    for r in results:
        groups.setdefault((r.algo, r.sweep_value), []).append(getattr(r, metric))
    return {k: float(np.median(v)) for k, v in groups.items()}


# ---------------------------------------------------------------------------
# tiny-instance oracle

TINY_GRID_POINTS = 3


def tiny_scenario_config(seed=0):
    """Canonical tiny instance: 2 BSs, 2 IMDs, 1 task each, 1 subchannel, 2 algorithms.

    Local capacity is too small for any deadline, so tasks must be offloaded,
    and security levels are reachable with the two algorithms.
    """
    return ScenarioConfig(
        region_side_m=100.0, N=2, K=2, M=1, Q=1, W=2e6, w=2e6, L=2,
        f_lmax_range=(2e8, 4e8),
        task_ranges=TaskRanges(
            d_mb=(0.01, 0.05), ell_mcycles=(500.0, 1000.0), tau_max_s=(0.5, 1.0),
            rho=(1, 2), theta=(1.0, 3.0), lam_usd=(5e3, 10e3),
        ),
        cache_capacity_per_bs=0,
        los_mode="expected",
        seed=seed,
    )


@dataclass
class OracleRow:
    algo: str
    seed: int
    fitness: float
    optimum: float
    gap: float


def optimality_gap(fitness, optimum):
    """Relative shortfall against the exhaustive optimum (negative when better than the grid)."""
    return (optimum - fitness) / abs(optimum) if optimum != 0 else optimum - fitness


def oracle_compare(seeds=range(10), algorithms=("fihas", "coa", "clca"), solver=None, scenario_seed=0, out_dir=None):
    """Gap of each algorithm to the exhaustive grid optimum on the tiny instance."""
    scenario = generate_scenario(tiny_scenario_config(scenario_seed))
    cfg = (solver or SolverConfig(I=30, T1=300, T2=200)).validate()
    opt = solve(scenario, "exhaustive", cfg, grid_points=TINY_GRID_POINTS).fitness
    rows = []
    for seed in seeds:
        rows.append(OracleRow("exhaustive", int(seed), opt, opt, 0.0))
        for algo in algorithms:
            g = solve(scenario, algo, cfg, seed=int(seed)).fitness
            rows.append(OracleRow(algo, int(seed), g, opt, optimality_gap(g, opt)))
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "oracle.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("algo", "seed", "fitness", "optimum", "gap"))
            for r in rows:
                w.writerow((r.algo, r.seed, _fmt(r.fitness), _fmt(r.optimum), _fmt(r.gap)))
    return rows
