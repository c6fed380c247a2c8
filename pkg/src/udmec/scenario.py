"""Seeded generation of network instances.

A :class:`Scenario` is immutable once built: its arrays are flagged
read-only so solver workers may share one instance.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from . import channel
from .config import (
    BITS_PER_MB,
    MCYCLES,
    ConfigError,
    ScenarioConfig,
    scenario_config_from_mapping,
)
from .rng import stream

FORMAT_NAME = "udmec-scenario"
FORMAT_VERSION = 1
KMEANS_MAX_ITER = 100


@dataclass(frozen=True)
class Task:
    d: float  # bits
    ell: float  # CPU cycles
    tau_max: float  # seconds
    rho: int
    theta: float
    lam: float  # USD


@dataclass(frozen=True)
class CryptoProfile:
    rho_dot: np.ndarray  # protection level of algorithm l (= l)
    enc_cycles: np.ndarray
    dec_cycles: np.ndarray
    energy_per_bit: np.ndarray

    @property
    def L(self):
        return len(self.rho_dot)

    @classmethod
    def from_config(cls, cfg):
        L = cfg.L
        return cls(
            rho_dot=_frozen(np.arange(1, L + 1, dtype=float)),
            enc_cycles=_frozen(np.asarray(cfg.enc_cycles[:L], dtype=float)),
            dec_cycles=_frozen(np.asarray(cfg.dec_cycles[:L], dtype=float)),
            energy_per_bit=_frozen(np.asarray(cfg.energy_per_bit[:L], dtype=float)),
        )


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Scenario:
    config: ScenarioConfig
    bs_positions: np.ndarray  # (N, 2) meters
    imd_positions: np.ndarray  # (K, 2) meters
    cluster_of_bs: np.ndarray  # (N,) labels 1..Q
    S: int
    d: np.ndarray  # (K, M) bits
    ell: np.ndarray  # (K, M) cycles
    tau_max: np.ndarray  # (K, M) seconds
    rho: np.ndarray  # (K, M) int
    theta: np.ndarray  # (K, M)
    lam: np.ndarray  # (K, M) USD
    cache: np.ndarray  # (N, K, M) {0, 1}
    crypto: CryptoProfile
    distances: np.ndarray  # (N, K) meters
    gains: np.ndarray  # (N, K) linear
    los: np.ndarray  # (N, K) bool
    f_lmax: np.ndarray  # (K,) cycles/s

    @property
    def N(self):
        return self.config.N

    @property
    def K(self):
        return self.config.K

    @property
    def M(self):
        return self.config.M

    @property
    def L(self):
        return self.config.L

    @property
    def p_max(self):
        return np.full(self.K, self.config.p_max_w)

    @property
    def f_mmax(self):
        return np.full(self.N, float(self.config.f_mmax))

    @property
    def noise_power(self):
        return self.config.noise_power_w

    def task(self, k, m):
        return Task(
            d=float(self.d[k, m]),
            ell=float(self.ell[k, m]),
            tau_max=float(self.tau_max[k, m]),
            rho=int(self.rho[k, m]),
            theta=float(self.theta[k, m]),
            lam=float(self.lam[k, m]),
        )

    def failure_table(self):
        """Failure probability of every task under every algorithm, shape ``(K, M, L)``."""
        gap = self.rho[..., None] - self.crypto.rho_dot[None, None, :]
        return np.where(gap > 0, -np.expm1(-self.theta[..., None] * gap), 0.0)

    def to_dict(self):
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "config": _config_to_dict(self.config),
            "bs_positions": self.bs_positions.tolist(),
            "imd_positions": self.imd_positions.tolist(),
            "cluster_of_bs": self.cluster_of_bs.tolist(),
            "S": int(self.S),
            "tasks": {
                name: getattr(self, name).tolist()
                for name in ("d", "ell", "tau_max", "rho", "theta", "lam")
            },
            "cache": self.cache.tolist(),
            "distances": self.distances.tolist(),
            "gains": self.gains.tolist(),
            "los": self.los.astype(int).tolist(),
            "f_lmax": self.f_lmax.tolist(),
        }

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None


def _config_to_dict(cfg):
    out = dataclasses.asdict(cfg)
    return json.loads(json.dumps(out))


def subchannel_count(W, w, Q):
    """Subchannels per cluster: ``W / (w Q)`` rounded half-up, at least 1."""
    if W <= 0 or w <= 0 or Q <= 0:
        raise ValueError("W, w and Q must be positive")
    return max(1, int(math.floor(W / (w * Q) + 0.5)))


def _wcss(points, centers, labels):
    return float(((points - centers[labels]) ** 2).sum())


def kmeans_lloyd(points, Q, rng, max_iter=KMEANS_MAX_ITER):
    """Lloyd's algorithm with k-means++ seeding.

    Returns ``(labels, centers, wcss_history)`` with 0-based labels. The
    history records the within-cluster sum of squares after each assignment
    step.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if Q > n:
        raise ConfigError("Q", f"cluster count {Q} exceeds point count {n}")
    centers = np.empty((Q, pts.shape[1]))
    centers[0] = pts[rng.integers(n)]
    d2 = ((pts - centers[0]) ** 2).sum(1)
    for q in range(1, Q):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers[q] = pts[idx]
        d2 = np.minimum(d2, ((pts - centers[q]) ** 2).sum(1))

    history = []
    labels = None
    for _ in range(max_iter):
        dist = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        new_labels = dist.argmin(1)
        history.append(_wcss(pts, centers, new_labels))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for q in range(Q):
            members = pts[labels == q]
            if len(members):
                centers[q] = members.mean(0)
            else:
                # re-seed an empty cluster at the point farthest from its center
                far = int(((pts - centers[labels]) ** 2).sum(1).argmax())
                centers[q] = pts[far]
    return labels, centers, history


def cluster_bs_kmeans(bs_positions, Q, seed):
    """Cluster label (1..Q) of each BS."""
    pts = np.asarray(bs_positions, dtype=float)
    if Q > len(pts):
        raise ConfigError("Q", f"cluster count {Q} exceeds BS count {len(pts)}")
    labels, _, _ = kmeans_lloyd(pts, Q, stream(seed, "kmeans"))
    return labels + 1


def popularity_order(K, M, zipf_exponent, rng, requests_per_task=20):
    """Flattened task indices (``k * M + m``) in descending popularity.

    Each task gets a catalogue rank from a seeded permutation; request counts
    are then drawn from a Zipf law over ranks and tasks are ordered by count,
    ties broken by rank.
    """
    n_items = K * M
    rank_of_item = rng.permutation(n_items)  # 0 = most popular rank
    weights = (np.arange(1, n_items + 1, dtype=float)) ** (-zipf_exponent)
    weights /= weights.sum()
    drawn_ranks = rng.choice(n_items, size=requests_per_task * n_items, p=weights)
    counts_by_rank = np.bincount(drawn_ranks, minlength=n_items)
    counts = counts_by_rank[rank_of_item]
    return np.lexsort((rank_of_item, -counts))


def place_cache(bs_positions, imd_positions, M, capacity, zipf_exponent, rng):
    """Pre-place tasks at BSs by popularity, nearest BS with free capacity first.

    Returns an ``(N, K, M)`` 0/1 array.
    """
    bs = np.asarray(bs_positions, dtype=float)
    imd = np.asarray(imd_positions, dtype=float)
    N, K = len(bs), len(imd)
    cache = np.zeros((N, K, M), dtype=np.int8)
    order = popularity_order(K, M, zipf_exponent, rng)
    if capacity <= 0:
        return cache
    free = np.full(N, int(capacity))
    dist = np.hypot(*(bs[:, None, :] - imd[None, :, :]).transpose(2, 0, 1))
    nearest = np.argsort(dist, axis=0, kind="stable")  # (N, K)
    for item in order:
        k, m = divmod(int(item), M)
        for n in nearest[:, k]:
            if free[n] > 0:
                cache[n, k, m] = 1
                free[n] -= 1
                break
        if not free.any():
            break
    return cache


def _draw_tasks(cfg, rng):
    tr = cfg.task_ranges
    K, M = cfg.K, cfg.M
    u = rng.random((K, M, 6))
    lo_rho, hi_rho = int(tr.rho[0]), int(tr.rho[1])

    def span(rng_pair, col):
        lo, hi = rng_pair
        return lo + (hi - lo) * u[:, :, col]

    return dict(
        d=span(tr.d_mb, 0) * BITS_PER_MB,
        ell=span(tr.ell_mcycles, 1) * MCYCLES,
        tau_max=span(tr.tau_max_s, 2),
        rho=np.minimum(lo_rho + np.floor(u[:, :, 3] * (hi_rho - lo_rho + 1)), hi_rho).astype(np.int64),
        theta=span(tr.theta, 4),
        lam=span(tr.lam_usd, 5),
    )


def generate_scenario(config: ScenarioConfig) -> Scenario:
    """Build the network instance fully determined by ``config`` (seed included)."""
    cfg = config.validate()
    seed = cfg.seed
    side = cfg.region_side_m
    # per-IMD draws keep smaller K a prefix of larger K for the same seed
    bs_pos = stream(seed, "bs_positions").uniform(0.0, side, size=(cfg.N, 2))
    imd_pos = stream(seed, "imd_positions").uniform(0.0, side, size=(cfg.K, 2))
    clusters = cluster_bs_kmeans(bs_pos, cfg.Q, seed)
    S = subchannel_count(cfg.W, cfg.w, cfg.Q)
    tasks = _draw_tasks(cfg, stream(seed, "tasks"))
    lo, hi = cfg.f_lmax_range
    f_lmax = lo + (hi - lo) * stream(seed, "f_lmax").random(cfg.K)

    distances = np.hypot(*(bs_pos[:, None, :] - imd_pos[None, :, :]).transpose(2, 0, 1))
    # guard against coincident points: pathloss is undefined at 0 m
    distances = np.maximum(distances, 1e-3)
    los_u = stream(seed, "los").random((cfg.K, cfg.N)).T
    gains, los, _ = channel.link_gains(distances, cfg.slope_params, los_u, mode=cfg.los_mode)

    cache = place_cache(bs_pos, imd_pos, cfg.M, cfg.cache_capacity_per_bs, cfg.zipf_exponent, stream(seed, "cache"))

    return Scenario(
        config=cfg,
        bs_positions=_frozen(bs_pos),
        imd_positions=_frozen(imd_pos),
        cluster_of_bs=_frozen(clusters.astype(np.int64)),
        S=S,
        cache=_frozen(cache),
        crypto=CryptoProfile.from_config(cfg),
        distances=_frozen(distances),
        gains=_frozen(gains),
        los=_frozen(los),
        f_lmax=_frozen(f_lmax),
        **{k: _frozen(v) for k, v in tasks.items()},
    )


def scenario_from_dict(data):
    if data.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} document")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported scenario version {data.get('version')}")
    cfg = scenario_config_from_mapping(data["config"]).validate()
    t = data["tasks"]
    return Scenario(
        config=cfg,
        bs_positions=_frozen(np.asarray(data["bs_positions"], dtype=float).reshape(cfg.N, 2)),
        imd_positions=_frozen(np.asarray(data["imd_positions"], dtype=float).reshape(cfg.K, 2)),
        cluster_of_bs=_frozen(np.asarray(data["cluster_of_bs"], dtype=np.int64)),
        S=int(data["S"]),
        d=_frozen(np.asarray(t["d"], dtype=float)),
        ell=_frozen(np.asarray(t["ell"], dtype=float)),
        tau_max=_frozen(np.asarray(t["tau_max"], dtype=float)),
        rho=_frozen(np.asarray(t["rho"], dtype=np.int64)),
        theta=_frozen(np.asarray(t["theta"], dtype=float)),
        lam=_frozen(np.asarray(t["lam"], dtype=float)),
        cache=_frozen(np.asarray(data["cache"], dtype=np.int8).reshape(cfg.N, cfg.K, cfg.M)),
        crypto=CryptoProfile.from_config(cfg),
        distances=_frozen(np.asarray(data["distances"], dtype=float)),
        gains=_frozen(np.asarray(data["gains"], dtype=float)),
        los=_frozen(np.asarray(data["los"], dtype=bool)),
        f_lmax=_frozen(np.asarray(data["f_lmax"], dtype=float)),
    )


def dumps(scenario):
    """Versioned plain-text (JSON) serialisation; floats round-trip exactly."""
    return json.dumps(scenario.to_dict(), indent=1, sort_keys=True) + "\n"


def loads(text):
    return scenario_from_dict(json.loads(text))


def save(scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(scenario))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
