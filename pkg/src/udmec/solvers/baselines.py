"""Fixed-rule reference policies: all-local (CLCA) and all-offload (COA)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import VARTHETA
from ..sysmodel import Assignment, evaluate


@dataclass
class BaselineResult:
    assignment: Assignment
    report: object

    @property
    def best_fitness(self):
        return self.report.fitness


def clca_assignment(scenario):
    """Every task runs locally at the slowest capacity that still meets its deadline."""
    K, M = scenario.K, scenario.M
    f = np.minimum(scenario.ell / scenario.tau_max, scenario.f_lmax[:, None])
    return Assignment(
        x=np.argmin(scenario.distances, axis=0) + 1,
        z=np.ones(K, dtype=np.int64),
        u=np.zeros((K, M), dtype=np.int64),
        v=np.full((K, M), scenario.L, dtype=np.int64),
        f_loc=f,
        p=np.full(K, VARTHETA),
    )


def run_clca(scenario, penalties=None):
    a = clca_assignment(scenario)
    return BaselineResult(a, evaluate(scenario, a, penalties))


def cheapest_algorithm(scenario):
    """Per task, the algorithm with the lowest breach cost; ties go to the largest index."""
    cost = scenario.lam[..., None] * scenario.failure_table()  # (K, M, L)
    rev = cost[..., ::-1]
    return scenario.L - np.argmin(rev, axis=-1)


def greedy_subchannels(scenario, x):
    """Subchannel per IMD: the least loaded one within its cluster so far (lowest index on ties)."""
    Q = int(scenario.cluster_of_bs.max())
    load = np.zeros((Q + 1, scenario.S), dtype=int)
    z = np.empty(scenario.K, dtype=np.int64)
    for k in range(scenario.K):
        c = scenario.cluster_of_bs[x[k] - 1]
        s = int(np.argmin(load[c]))
        load[c, s] += 1
        z[k] = s + 1
    return z


def coa_assignment(scenario):
    K, M = scenario.K, scenario.M
    x = np.argmax(scenario.gains, axis=0) + 1
    return Assignment(
        x=x,
        z=greedy_subchannels(scenario, x),
        u=np.repeat(x[:, None], M, axis=1),
        v=cheapest_algorithm(scenario),
        f_loc=np.asarray(scenario.f_lmax, dtype=float).copy(),
        p=np.asarray(scenario.p_max, dtype=float).copy(),
    )


def run_coa(scenario, penalties=None):
    a = coa_assignment(scenario)
    return BaselineResult(a, evaluate(scenario, a, penalties))
