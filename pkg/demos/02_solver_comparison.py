"""FIHAS against its ablations and the two fixed policies on one desk-scale instance."""

import numpy as np

from udmec import ScenarioConfig, evaluate, generate_scenario
from udmec.solvers import PROFILES, SolverConfig, solve

sc = generate_scenario(ScenarioConfig(N=10, K=8, M=2, seed=1))
cfg = SolverConfig(**PROFILES["desk"])

rows = []
for algo in ("fihas", "ihas", "iadgga", "adgga", "apso", "clca", "coa"):
    sol = solve(sc, algo, cfg, seed=1)
    rep = evaluate(sc, sol.assignment)
    rows.append((algo, sol.fitness, rep.tec, rep.td, rep.tsr, rep.csr, sol))

print(f"{'algo':8s} {'fitness':>10s} {'TEC (J)':>9s} {'TD (s)':>8s}  TSR  CSR")
for algo, g, tec, td, tsr, csr, _ in rows:
    print(f"{algo:8s} {g:10.4f} {tec:9.4f} {td:8.2f}  {tsr:.2f} {csr:.2f}")

# the hybrid trace: GA phase first, PSO refinement after T1
fihas = rows[0][-1]
marks = [0, 49, 99, cfg.T1 - 1, cfg.T1 + 49, cfg.T1 + cfg.T2 - 1]
print("\nFIHAS best fitness at iterations", [m + 1 for m in marks])
print(np.array([fihas.trace[m] for m in marks]))

a = fihas.assignment
print("\ntasks kept local:", int((a.u == 0).sum()), "of", a.u.size)
print("local capacity (MHz):", np.round(a.f_loc / 1e6, 1))
print("needed ell/tau_max (MHz):\n", np.round(sc.ell / sc.tau_max / 1e6, 1))
