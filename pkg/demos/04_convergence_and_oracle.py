"""Convergence of the hybrid against its ablation, and the tiny-instance optimality gap."""

import numpy as np

from udmec import harness as hz
from udmec.solvers import SolverConfig

spec = hz.ExperimentSpec(profile="desk", seeds=(0, 1, 2))
for r in hz.convergence_trace(spec):
    gain = r.best_fitness - r.fitness_at_t1
    print(f"{r.algo:5s} seed={r.seed}  G(T1)={r.fitness_at_t1:9.4f}  G(end)={r.best_fitness:9.4f}  PSO gain={gain:.4f}")
    print("       every 100 iterations:", np.round(r.trace[99::100], 3))

print("\nexhaustive grid on the 2-BS, 2-IMD instance")
rows = hz.oracle_compare(seeds=range(5), solver=SolverConfig(I=30, T1=300, T2=200))
opt = rows[0].optimum
print(f"grid optimum G*={opt:.6f}")
for algo in ("fihas", "coa", "clca"):
    gaps = [r.gap for r in rows if r.algo == algo]
    print(f"  {algo:5s} median gap {np.median(gaps):+.2e}  worst {max(gaps):+.2e}")
