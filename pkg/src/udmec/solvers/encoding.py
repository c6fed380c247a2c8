"""Flat gene encoding shared by the GA and PSO phases.

A population stores six segments with a leading individual axis:
``x``, ``z``, ``f``, ``p`` hold one gene per IMD and ``u``, ``v`` one gene
per virtual IMD (task ``(k, m)`` sits at column ``k * M + m``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import VARTHETA
from ..sysmodel import Assignment, evaluate_batch

SEGMENTS = ("x", "z", "u", "v", "f", "p")
DISCRETE = ("x", "z", "u", "v")


def round_half_up(a):
    return np.floor(np.asarray(a, dtype=float) + 0.5)


@dataclass(frozen=True)
class GeneBounds:
    lo: dict
    hi: dict

    @classmethod
    def from_scenario(cls, scenario):
        K, KM = scenario.K, scenario.K * scenario.M
        lo = {
            "x": np.ones(K), "z": np.ones(K), "u": np.zeros(KM), "v": np.ones(KM),
            "f": np.full(K, VARTHETA), "p": np.full(K, VARTHETA),
        }
        hi = {
            "x": np.full(K, float(scenario.N)), "z": np.full(K, float(scenario.S)),
            "u": np.full(KM, float(scenario.N)), "v": np.full(KM, float(scenario.L)),
            "f": np.asarray(scenario.f_lmax, dtype=float), "p": np.asarray(scenario.p_max, dtype=float),
        }
        return cls(lo, hi)

    def width(self, seg):
        return self.hi[seg] - self.lo[seg]

    def diagonal(self, seg):
        return float(np.linalg.norm(self.width(seg)))

    def clip(self, seg, a):
        a = np.clip(a, self.lo[seg], self.hi[seg])
        return a.astype(np.int64) if seg in DISCRETE else a


@dataclass
class Genes:
    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    f: np.ndarray
    p: np.ndarray

    def __len__(self):
        return len(self.x)

    def seg(self, name):
        return getattr(self, name)

    def copy(self):
        return Genes(*(getattr(self, s).copy() for s in SEGMENTS))

    def take(self, idx):
        return Genes(*(getattr(self, s)[idx].copy() for s in SEGMENTS))

    def put(self, idx, other):
        for s in SEGMENTS:
            getattr(self, s)[idx] = getattr(other, s)

    def row(self, i):
        return self.take(np.array([i]))

    def flat(self):
        """Concatenation of all segments as floats, shape ``(I, D)``."""
        return np.concatenate([getattr(self, s).astype(float) for s in SEGMENTS], axis=1)

    def equal_rows(self, other):
        """Boolean ``(I,)``: which rows equal the single-row ``other`` exactly."""
        eq = np.ones(len(self), dtype=bool)
        for s in SEGMENTS:
            eq &= np.all(getattr(self, s) == getattr(other, s)[0], axis=1)
        return eq

    @classmethod
    def concat(cls, parts):
        return cls(*(np.concatenate([getattr(g, s) for g in parts]) for s in SEGMENTS))

    def assignment(self, i, scenario):
        K, M = scenario.K, scenario.M
        return Assignment(
            x=self.x[i].copy(),
            z=self.z[i].copy(),
            u=self.u[i].reshape(K, M).copy(),
            v=self.v[i].reshape(K, M).copy(),
            f_loc=self.f[i].copy(),
            p=self.p[i].copy(),
        )

    @classmethod
    def from_assignments(cls, assignments):
        return cls(
            x=np.stack([a.x for a in assignments]).astype(np.int64),
            z=np.stack([a.z for a in assignments]).astype(np.int64),
            u=np.stack([a.u.reshape(-1) for a in assignments]).astype(np.int64),
            v=np.stack([a.v.reshape(-1) for a in assignments]).astype(np.int64),
            f=np.stack([a.f_loc for a in assignments]).astype(float),
            p=np.stack([a.p for a in assignments]).astype(float),
        )

    def within(self, bounds):
        ok = True
        for s in SEGMENTS:
            a = getattr(self, s)
            ok &= bool(np.all(a >= bounds.lo[s]) and np.all(a <= bounds.hi[s]))
            if s in DISCRETE:
                ok &= a.dtype.kind == "i"
        return ok


def random_genes(scenario, n, rng, bounds=None):
    """``n`` fresh individuals drawn by the initialisation rules."""
    b = bounds or GeneBounds.from_scenario(scenario)
    K, KM = scenario.K, scenario.K * scenario.M
    x = rng.integers(1, scenario.N + 1, size=(n, K))
    z = rng.integers(1, scenario.S + 1, size=(n, K))
    u = rng.integers(0, scenario.N + 1, size=(n, KM))
    v = rng.integers(1, scenario.L + 1, size=(n, KM))
    f = np.maximum(rng.uniform(0.0, 1.0, size=(n, K)) * b.hi["f"], VARTHETA)
    p = np.maximum(rng.uniform(0.0, 1.0, size=(n, K)) * b.hi["p"], VARTHETA)
    return Genes(x, z, u, v, f, p)


class Evaluator:
    """Batched fitness with operation counters.

    ``sweeps`` counts calls and ``evaluations`` counts individuals scored.
    """

    def __init__(self, scenario, penalties):
        self.scenario = scenario
        self.penalties = penalties
        self.sweeps = 0
        self.evaluations = 0

    def __call__(self, genes):
        sc = self.scenario
        n = len(genes)
        self.sweeps += 1
        self.evaluations += n
        be = evaluate_batch(
            sc, genes.x, genes.z,
            genes.u.reshape(n, sc.K, sc.M), genes.v.reshape(n, sc.K, sc.M),
            genes.f, genes.p, self.penalties,
        )
        return be.fitness
