"""Random (scenario, assignment) pairs for the dual-implementation checks."""

import numpy as np

from udmec.config import ScenarioConfig
from udmec.scenario import generate_scenario

from conftest import random_assignment, with_arrays

_BASES = {}


def _base(N, K, M):
    key = (N, K, M)
    if key not in _BASES:
        cfg = ScenarioConfig(region_side_m=200.0, N=N, K=K, M=M, Q=min(2, N), W=8e6, w=2e6, seed=N * 100 + K * 10 + M)
        _BASES[key] = generate_scenario(cfg)
    return _BASES[key]


def random_pair(rng, max_n=4, max_k=4, max_m=3, multi_copy=False):
    """Scenario with a randomised cache (and tasks) plus a random assignment."""
    N, K, M = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_k + 1)), int(rng.integers(1, max_m + 1))
    sc = _base(N, K, M)
    if multi_copy:
        cache = rng.integers(0, 2, (N, K, M))
    else:
        # at most one copy per task, as the placement rule produces
        site = rng.integers(-1, N, (K, M))
        cache = np.zeros((N, K, M), dtype=np.int8)
        kk, mm = np.nonzero(site >= 0)
        cache[site[kk, mm], kk, mm] = 1
    sc = with_arrays(
        sc,
        cache=cache.astype(np.int8),
        d=rng.uniform(8e4, 4.2e5, (K, M)),
        ell=rng.uniform(1e7, 5e7, (K, M)),
        rho=rng.integers(1, 7, (K, M)),
    )
    return sc, random_assignment(sc, rng, per_task_f=bool(rng.integers(2)))
