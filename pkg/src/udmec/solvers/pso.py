"""Adaptive PSO with a guaranteed-convergence update of the global-best particle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..rng import Streams
from .encoding import DISCRETE, SEGMENTS, Evaluator, GeneBounds, Genes, round_half_up

# segments sharing the per-IMD random factors vs the per-virtual-IMD ones
_PER_IMD = ("x", "z", "f", "p")


def update_inertia(omega, t, T2, cfg):
    """Inertia weight for iteration ``t``.

    Linear decay from ``omega_max`` floored at ``omega_min``; with
    ``cfg.literal_eq39`` the recurrence ``omega - t * span / T2`` is applied
    to ``omega`` instead.
    """
    span = cfg.omega_max - cfg.omega_min
    if cfg.literal_eq39:
        return omega - t * span / T2
    return max(cfg.omega_max - t * span / T2, cfg.omega_min)


def update_scaling(omega_dot, successes, failures, cfg):
    if successes > cfg.mu4:
        return 2.0 * omega_dot
    if failures > cfg.mu5:
        return 0.5 * omega_dot
    return omega_dot


def _finish_positions(pos_float, bounds):
    out = {}
    for s in SEGMENTS:
        a = pos_float[s]
        if s in DISCRETE:
            a = round_half_up(a)
        out[s] = bounds.clip(s, a)
    return Genes(*(out[s] for s in SEGMENTS))


def _clip_velocity(vel, bounds):
    return {s: np.clip(vel[s], -bounds.width(s), bounds.width(s)) for s in SEGMENTS}


def _factors(rng, n, K, KM):
    """One draw per IMD for x/z/f/p and one per virtual IMD for u/v."""
    per_imd = rng.random((n, K))
    per_task = rng.random((n, KM))
    return {s: (per_imd if s in _PER_IMD else per_task) for s in SEGMENTS}


def update_common_particles(pos, vel, pbest, gbest, omega, cfg, bounds, rng):
    """Velocity and position update for the rows of ``pos``; returns ``(pos, vel)``."""
    n = len(pos)
    K, KM = pos.x.shape[1], pos.u.shape[1]
    xi = _factors(rng, n, K, KM)
    zeta = _factors(rng, n, K, KM)
    new_vel = {}
    new_pos = {}
    for s in SEGMENTS:
        cur = pos.seg(s).astype(float)
        new_vel[s] = (
            omega * vel[s]
            + cfg.kappa3 * xi[s] * (pbest.seg(s) - cur)
            + cfg.kappa4 * zeta[s] * (gbest.seg(s)[0] - cur)
        )
    new_vel = _clip_velocity(new_vel, bounds)
    for s in SEGMENTS:
        new_pos[s] = pos.seg(s) + new_vel[s]
    return _finish_positions(new_pos, bounds), new_vel


def perturbation_span(bounds, cfg):
    """Per-segment scale of the random search term around the global best."""
    return {
        s: (np.ones_like(bounds.width(s)) if s in DISCRETE else cfg.gc_continuous_scale * bounds.width(s))
        for s in SEGMENTS
    }


def update_global_best_particle(pos, vel, gbest, omega_dot, cfg, bounds, rng):
    """Local search step of the particle owning the global best (single row)."""
    K, KM = pos.x.shape[1], pos.u.shape[1]
    a = _factors(rng, 1, K, KM)
    span = perturbation_span(bounds, cfg)
    new_vel = {}
    new_pos = {}
    for s in SEGMENTS:
        noise = omega_dot * (1.0 - 2.0 * a[s]) * span[s]
        g = gbest.seg(s).astype(float)
        new_vel[s] = -pos.seg(s) + g + cfg.kappa5 * vel[s] + noise
        new_pos[s] = g + cfg.kappa5 * vel[s] + noise
    return _finish_positions(new_pos, bounds), _clip_velocity(new_vel, bounds)


@dataclass
class PSOResult:
    best: Genes
    best_fitness: float
    trace: np.ndarray
    omega_dot: list = field(default_factory=list)


def run_apso(scenario, cfg, population, fitness=None, seed=0, *, streams=None, callback=None):
    """Refine ``population`` for ``cfg.T2`` iterations; trace holds the global-best fitness."""
    cfg = cfg.validate()
    st = streams or Streams(seed)
    rng = st["pso"]
    bounds = GeneBounds.from_scenario(scenario)
    evaluate = Evaluator(scenario, cfg.penalties)
    I = len(population)

    pos = population.copy()
    fit = evaluate(pos) if fitness is None else np.asarray(fitness, dtype=float).copy()
    vel = {s: rng.random(pos.seg(s).shape) for s in SEGMENTS}
    pbest, pbest_fit = pos.copy(), fit.copy()
    owner = int(np.argmax(pbest_fit))
    gbest, gbest_fit = pbest.row(owner), float(pbest_fit[owner])

    omega = cfg.omega_max
    omega_dot = cfg.omega_dot0
    successes = failures = 0
    trace = np.empty(cfg.T2)
    scaling = []

    for t in range(1, cfg.T2 + 1):
        omega = update_inertia(omega, t, cfg.T2, cfg)
        common = np.arange(I) if not cfg.gcpso else np.delete(np.arange(I), owner)

        new_pos, new_vel = update_common_particles(
            pos.take(common), {s: vel[s][common] for s in SEGMENTS},
            pbest.take(common), gbest, omega, cfg, bounds, rng,
        )
        pos.put(common, new_pos)
        for s in SEGMENTS:
            vel[s][common] = new_vel[s]

        if cfg.gcpso:
            g_pos, g_vel = update_global_best_particle(
                pos.row(owner), {s: vel[s][owner : owner + 1] for s in SEGMENTS},
                gbest, omega_dot, cfg, bounds, rng,
            )
            pos.put(np.array([owner]), g_pos)
            for s in SEGMENTS:
                vel[s][owner] = g_vel[s][0]

        fit = evaluate(pos)
        better = fit > pbest_fit
        if better.any():
            idx = np.flatnonzero(better)
            pbest.put(idx, pos.take(idx))
            pbest_fit[idx] = fit[idx]

        cand = int(np.argmax(pbest_fit))
        if pbest_fit[cand] > gbest_fit:
            owner = cand
            gbest, gbest_fit = pbest.row(cand), float(pbest_fit[cand])
            successes, failures = successes + 1, 0
        else:
            successes, failures = 0, failures + 1
        omega_dot = update_scaling(omega_dot, successes, failures, cfg)
        scaling.append(omega_dot)
        trace[t - 1] = gbest_fit
        if callback is not None:
            callback(t, gbest_fit)

    return PSOResult(gbest, gbest_fit, trace, scaling)
