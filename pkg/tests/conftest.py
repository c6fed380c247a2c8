import dataclasses

import numpy as np
import pytest

from udmec.config import ScenarioConfig
from udmec.scenario import _frozen, generate_scenario
from udmec.sysmodel import Assignment


def desk_config(seed=0, **kw):
    return ScenarioConfig(N=10, K=8, M=2, seed=seed, **kw)


def small_config(seed=0, **kw):
    base = dict(region_side_m=300.0, N=4, K=5, M=2, Q=2, L=6, cache_capacity_per_bs=3, seed=seed)
    base.update(kw)
    return ScenarioConfig(**base)


def with_arrays(scenario, **arrays):
    """Copy of ``scenario`` with some arrays swapped (read-only like the originals)."""
    return dataclasses.replace(scenario, **{k: _frozen(np.asarray(v)) for k, v in arrays.items()})


def random_assignment(sc, rng, per_task_f=False):
    K, M = sc.K, sc.M
    f_shape = (K, M) if per_task_f else (K,)
    f_hi = sc.f_lmax[:, None] if per_task_f else sc.f_lmax
    return Assignment(
        x=rng.integers(1, sc.N + 1, K),
        z=rng.integers(1, sc.S + 1, K),
        u=rng.integers(0, sc.N + 1, (K, M)),
        v=rng.integers(1, sc.L + 1, (K, M)),
        f_loc=rng.uniform(0.05, 1.0, f_shape) * f_hi,
        p=rng.uniform(0.05, 1.0, K) * sc.p_max,
    )


@pytest.fixture(scope="session")
def desk_scenario():
    return generate_scenario(desk_config(1))


@pytest.fixture(scope="session")
def small_scenario():
    return generate_scenario(small_config(3))


# one summary line per acceptance check, echoed after the test run
ACCEPTANCE_LINES = []


def report_line(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
