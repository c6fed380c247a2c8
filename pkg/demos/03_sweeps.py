"""Desk-scale versions of the density, local-capacity and similarity-threshold sweeps.

Takes several minutes. Medians over five seeds are printed; add ``out_dir``
to the specs to keep the CSVs.
"""

import dataclasses

from udmec import harness as hz

seeds = (0, 1, 2, 3, 4)
base = hz.ExperimentSpec(profile="desk", seeds=seeds)


def show(results, values, algos, metric):
    med = hz.medians(results, metric)
    for a in algos:
        print(f"  {a:7s}", " ".join(f"{med[(a, v)]:9.3f}" for v in values))


algos = ("fihas", "ihas", "clca", "coa")
res = hz.sweep_imd_density(dataclasses.replace(base, algorithms=algos))
print("TEC (J) against K =", hz.DEFAULT_SWEEPS["K"])
show(res, hz.DEFAULT_SWEEPS["K"], algos, "tec")
print("TD (s)")
show(res, hz.DEFAULT_SWEEPS["K"], algos, "td")

res = hz.sweep_local_capacity(dataclasses.replace(base, algorithms=("fihas", "clca", "coa")))
print("\nTEC (J) against f_lmax (GHz) =", hz.DEFAULT_SWEEPS["f_lmax"])
show(res, hz.DEFAULT_SWEEPS["f_lmax"], ("fihas", "clca", "coa"), "tec")

res = hz.sweep_similarity_threshold(dataclasses.replace(base, algorithms=("iadgga", "adgga")))
print("\nGA-only runs against mu3 =", hz.DEFAULT_SWEEPS["mu3"])
print(" final fitness")
show(res, hz.DEFAULT_SWEEPS["mu3"], ("iadgga", "adgga"), "best_fitness")
print(" TEC (J)")
show(res, hz.DEFAULT_SWEEPS["mu3"], ("iadgga", "adgga"), "tec")
