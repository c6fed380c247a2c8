"""A small network, two hand-made policies, and where the time and energy go."""

import numpy as np

from udmec import ScenarioConfig, evaluate, generate_scenario
from udmec.solvers.baselines import clca_assignment, coa_assignment
from udmec.sysmodel import constraint_report

np.set_printoptions(precision=3, suppress=True)

cfg = ScenarioConfig(N=10, K=8, M=2, seed=1)
sc = generate_scenario(cfg)

print(f"{sc.N} BSs in {sc.config.Q} clusters, {sc.S} subchannels per cluster")
print("cluster of each BS:", sc.cluster_of_bs)
print("cached tasks per BS:", sc.cache.sum((1, 2)))
print("security levels required:\n", sc.rho)

# nearest-BS distances and the matching gains
near = sc.distances.min(0)
print("nearest BS distance (m):", near)
print("best gain (dB):", 10 * np.log10(sc.gains.max(0)))

# everything local at the slowest capacity meeting each deadline
local = evaluate(sc, clca_assignment(sc))
print(f"\nall-local:   TEC={local.tec:.4f} J  TD={local.td:.2f} s  TSR={local.tsr}  CSR={local.csr}")

# everything offloaded to the best-gain BS at full power
off_a = coa_assignment(sc)
off = evaluate(sc, off_a)
print(f"all-offload: TEC={off.tec:.4f} J  TD={off.td:.2f} s  TSR={off.tsr}  CSR={off.csr}")
print("routes used:", sorted({r for row in off.routes for r in row}))

# delay components of the offloaded tasks, summed over tasks
parts = {n: getattr(off, n).sum() for n in ("tau_loce", "tau_up", "tau_bh", "tau_mecd", "tau_mecc")}
for name, val in parts.items():
    print(f"  {name:9s} {val:8.4f} s")
print("energy split: encryption", off.e_loce.sum().round(4), "J, upload", off.e_up.sum().round(4), "J")

rep = constraint_report(sc, off_a, off)
print("constraints failing under all-offload:", [k for k, v in rep["constraints"].items() if not v] or "none")
