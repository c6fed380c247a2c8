"""Brute-force optimum over a discretised decision space, for tiny instances only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sysmodel import PenaltyConfig, evaluate_batch
from .encoding import Genes

MAX_CANDIDATES = 10**7
CHUNK = 1 << 15


class SearchSpaceTooLarge(ValueError):
    def __init__(self, size, limit):
        self.size = size
        super().__init__(f"search space has {size} candidates, limit is {limit}")


def grid_levels(hi, points):
    """``points`` evenly spaced levels in ``(0, hi]``: ``hi * j / points``."""
    return np.asarray(hi, dtype=float)[:, None] * (np.arange(1, points + 1) / points)[None, :]


def _radices(scenario, points):
    K, KM = scenario.K, scenario.K * scenario.M
    return (
        [scenario.N] * K + [scenario.S] * K + [scenario.N + 1] * KM
        + [scenario.L] * KM + [points] * K + [points] * K
    )


def search_space_size(scenario, points):
    return int(np.prod([int(r) for r in _radices(scenario, points)], dtype=object))


def decode(scenario, digits, points):
    """Mixed-radix digit matrix ``(B, D)`` to a gene population."""
    K, KM = scenario.K, scenario.K * scenario.M
    f_lv = grid_levels(scenario.f_lmax, points)
    p_lv = grid_levels(scenario.p_max, points)
    o = np.cumsum([0, K, K, KM, KM, K, K])
    kk = np.arange(K)[None, :]
    return Genes(
        x=digits[:, o[0]:o[1]] + 1,
        z=digits[:, o[1]:o[2]] + 1,
        u=digits[:, o[2]:o[3]].copy(),
        v=digits[:, o[3]:o[4]] + 1,
        f=f_lv[kk, digits[:, o[4]:o[5]]],
        p=p_lv[kk, digits[:, o[5]:o[6]]],
    )


def _digits(indices, radices):
    out = np.empty((len(indices), len(radices)), dtype=np.int64)
    rem = indices.copy()
    for j in range(len(radices) - 1, -1, -1):
        rem, out[:, j] = np.divmod(rem, radices[j])
    return out


def _fitness(scenario, genes, penalties):
    n = len(genes)
    K, M = scenario.K, scenario.M
    return evaluate_batch(
        scenario, genes.x, genes.z, genes.u.reshape(n, K, M), genes.v.reshape(n, K, M),
        genes.f, genes.p, penalties,
    ).fitness


@dataclass
class ExhaustiveResult:
    best: Genes
    best_fitness: float
    candidates: int

    def assignment(self, scenario):
        return self.best.assignment(0, scenario)


def exhaustive_solve(scenario, points=3, penalties=None, max_candidates=MAX_CANDIDATES):
    """Maximum-fitness assignment over the grid (first one in enumeration order on ties)."""
    pen = penalties or PenaltyConfig()
    total = search_space_size(scenario, points)
    if total > max_candidates:
        raise SearchSpaceTooLarge(total, max_candidates)
    radices = np.array(_radices(scenario, points), dtype=np.int64)
    best_fit, best_digits = -np.inf, None
    for start in range(0, total, CHUNK):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        digits = _digits(idx, radices)
        fit = _fitness(scenario, decode(scenario, digits, points), pen)
        j = int(np.argmax(fit))
        if best_digits is None or fit[j] > best_fit:
            best_fit, best_digits = float(fit[j]), digits[j : j + 1]
    return ExhaustiveResult(decode(scenario, best_digits, points), best_fit, total)


def random_search(scenario, points, samples, rng, penalties=None):
    """Best of ``samples`` uniform draws from the same grid."""
    pen = penalties or PenaltyConfig()
    radices = np.array(_radices(scenario, points), dtype=np.int64)
    best_fit, best = -np.inf, None
    for start in range(0, samples, CHUNK):
        n = min(CHUNK, samples - start)
        digits = rng.integers(0, radices, size=(n, len(radices)))
        genes = decode(scenario, digits, points)
        fit = _fitness(scenario, genes, pen)
        j = int(np.argmax(fit))
        if fit[j] > best_fit:
            best_fit, best = float(fit[j]), genes.row(j)
    return best, best_fit
