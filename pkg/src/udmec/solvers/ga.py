"""Adaptive diversity-guided genetic algorithm (IADGGA and the ADGGA baseline)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..rng import Streams
from .encoding import DISCRETE, SEGMENTS, Evaluator, GeneBounds, Genes, random_genes, round_half_up


def _clamp01(p):
    return min(max(p, 0.0), 1.0)


def crossover_probability(g_pair, g_ave, g_max, cfg):
    """Adaptive crossover probability of an adjacent pair with best fitness ``g_pair``."""
    if not g_pair >= g_ave:
        return _clamp01(cfg.hbar1)
    spread = g_max - g_ave
    ratio = (g_pair - g_ave) / spread if spread > 0 and math.isfinite(spread) else 1.0
    tail = (cfg.hbar1 - cfg.hbar2) / (1.0 + math.exp(cfg.hbar3 * ratio))
    base = cfg.hbar2 if cfg.mirrored_crossover else cfg.hbar1
    return _clamp01(base + tail)


def linear_crossover_probability(g_pair, g_ave, g_max, cfg):
    """Linear stand-in schedule used by the ADGGA baseline."""
    if not g_pair >= g_ave:
        return _clamp01(cfg.hbar1)
    spread = g_max - g_ave
    ratio = (g_max - g_pair) / spread if spread > 0 and math.isfinite(spread) else 0.0
    return _clamp01(cfg.hbar2 + (cfg.hbar1 - cfg.hbar2) * ratio)


def mutation_probability(t, T1, cfg):
    return _clamp01(cfg.hbar4 + cfg.hbar5 / (1.0 + math.log(cfg.hbar6 * (T1 - t + 1))))


def linear_mutation_probability(t, T1, cfg):
    return _clamp01(cfg.linear_mut_base + cfg.linear_mut_slope * t / T1)


@dataclass
class DiversityState:
    varsigma: float
    centroid: dict
    diagonals: dict


def diversity(genes, bounds):
    """Mean normalised distance to the centroid, averaged over the six segments."""
    terms = []
    centroid = {}
    diagonals = {}
    for s in SEGMENTS:
        a = genes.seg(s).astype(float)
        # offsets from the first row keep identical rows at exactly zero spread
        c = a[0] + (a - a[0]).mean(0)
        centroid[s] = c
        diag = bounds.diagonal(s)
        diagonals[s] = diag
        if diag > 0:
            terms.append(np.linalg.norm(a - c, axis=1).mean() / diag)
        else:
            terms.append(0.0)
    return DiversityState(float(np.mean(terms)), centroid, diagonals)


def diversity_mutation_probability(varsigma, cfg):
    if varsigma < cfg.mu1:
        return cfg.hbar7
    if varsigma < cfg.mu2:
        return cfg.hbar8
    return cfg.hbar9


def similarity(a, b):
    """``1 / (1 + distance)`` between two flat gene vectors."""
    return 1.0 / (1.0 + float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float))))


def pairwise_similarity(genes):
    flat = genes.flat()
    dist = np.linalg.norm(flat[:, None, :] - flat[None, :, :], axis=-1)
    return 1.0 / (1.0 + dist)


def tournament_select_elitist(genes, fitness, best, best_fit, rng):
    """Size-2 tournaments; the historical best replaces the worst pick if absent."""
    I = len(genes)
    a = rng.integers(0, I, size=I)
    b = rng.integers(0, I, size=I)
    winners = np.where(fitness[a] >= fitness[b], a, b)
    sel = genes.take(winners)
    fit = fitness[winners].copy()
    if best is not None and not sel.equal_rows(best).any():
        worst = int(np.argmin(fit))
        sel.put(np.array([worst]), best)
        fit[worst] = best_fit
    return sel, fit


def crossover_pair(g, i, j, cuts):
    """Single-point crossover per segment between rows ``i`` and ``j`` (in place)."""
    for s, c in zip(SEGMENTS, cuts):
        seg = g.seg(s)
        tail_i = seg[i, c:].copy()
        seg[i, c:] = seg[j, c:]
        seg[j, c:] = tail_i


def crossover(genes, fitness, cfg, rng, adaptive=True):
    """Adjacent-pair crossover; returns the offspring population (input untouched)."""
    out = genes.copy()
    finite = fitness[np.isfinite(fitness)]
    g_ave = float(finite.mean()) if finite.size else -math.inf
    g_max = float(finite.max()) if finite.size else -math.inf
    prob_fn = crossover_probability if adaptive else linear_crossover_probability
    lengths = [genes.seg(s).shape[1] for s in SEGMENTS]
    for i in range(0, len(genes) - 1, 2):
        j = i + 1
        pr = prob_fn(float(max(fitness[i], fitness[j])), g_ave, g_max, cfg)
        draw = rng.random()
        cuts = [int(rng.integers(0, n)) for n in lengths]
        if draw < pr:
            crossover_pair(out, i, j, cuts)
    return out


def mutate(genes, prob, bounds, rng):
    """Per-gene blend toward the upper or lower box edge; returns a new population.

    Each gene mutates with probability ``prob``; ``kappa1`` sets the step and
    ``kappa2`` the direction. Discrete genes are rounded half-up.
    """
    out = genes.copy()
    for s in SEGMENTS:
        a = genes.seg(s).astype(float)
        mask = rng.random(a.shape) < prob
        k1 = rng.random(a.shape)
        k2 = rng.random(a.shape)
        target = np.where(k2 > 0.5, bounds.hi[s], bounds.lo[s])
        new = k1 * target + (1.0 - k1) * a
        if s in DISCRETE:
            new = round_half_up(new)
        new = np.where(mask, new, a)
        setattr(out, s, bounds.clip(s, new))
    return out


def mutate_random_individual(genes, prob, bounds, rng):
    """Mutate one uniformly chosen individual gene-wise with probability ``prob``."""
    i = int(rng.integers(len(genes)))
    out = genes.copy()
    out.put(np.array([i]), mutate(genes.row(i), prob, bounds, rng))
    return out


def eliminate_similar(genes, fitness, mu3, protected, scenario, rng, bounds=None):
    """Replace the weaker member of every too-similar pair by a fresh individual.

    Returns ``(genes, replaced_mask, comparisons)``.
    """
    I = len(genes)
    sim = pairwise_similarity(genes)
    replaced = np.zeros(I, dtype=bool)
    comparisons = 0
    for i in range(I):
        for j in range(i + 1, I):
            comparisons += 1
            if replaced[i] or replaced[j] or sim[i, j] <= mu3:
                continue
            loser = j if fitness[j] <= fitness[i] else i
            if protected[loser]:
                loser = i if loser == j else j
            if protected[loser]:
                continue
            replaced[loser] = True
    out = genes.copy()
    n_new = int(replaced.sum())
    if n_new:
        out.put(np.flatnonzero(replaced), random_genes(scenario, n_new, rng, bounds))
    return out, replaced, comparisons


@dataclass
class GAResult:
    best: Genes
    best_fitness: float
    trace: np.ndarray
    population: Genes
    fitness: np.ndarray
    stats: list = field(default_factory=list)


def run_iadgga(scenario, cfg, seed, *, streams=None, callback=None):
    """Run the GA phase for ``cfg.T1`` generations.

    ``cfg.adaptive_probs`` and ``cfg.elimination`` both off gives the ADGGA
    baseline. ``stats`` holds per-generation operation counters.
    """
    cfg = cfg.validate()
    st = streams or Streams(seed)
    bounds = GeneBounds.from_scenario(scenario)
    evaluate = Evaluator(scenario, cfg.penalties)

    pop = random_genes(scenario, cfg.I, st["init"], bounds)
    fit = evaluate(pop)
    b = int(np.argmax(fit))
    best, best_fit = pop.row(b), float(fit[b])
    trace = np.empty(cfg.T1)
    stats = []
    gate = cfg.elimination_start_fraction * cfg.T1

    for t in range(1, cfg.T1 + 1):
        sweeps0, evals0 = evaluate.sweeps, evaluate.evaluations
        pop, fit = tournament_select_elitist(pop, fit, best, best_fit, st["selection"])

        div = diversity(pop, bounds)
        pop = mutate(pop, diversity_mutation_probability(div.varsigma, cfg), bounds, st["mutation"])
        fit = evaluate(pop)

        pop = crossover(pop, fit, cfg, st["crossover"], adaptive=cfg.adaptive_probs)
        pm = mutation_probability(t, cfg.T1, cfg) if cfg.adaptive_probs else linear_mutation_probability(t, cfg.T1, cfg)
        pop = mutate_random_individual(pop, pm, bounds, st["mutation"])

        comparisons = 0
        if cfg.elimination and t >= gate:
            fit = evaluate(pop)
            protected = pop.equal_rows(best)
            pop, _, comparisons = eliminate_similar(pop, fit, cfg.mu3, protected, scenario, st["elimination"], bounds)

        fit = evaluate(pop)
        b = int(np.argmax(fit))
        if fit[b] > best_fit:
            best, best_fit = pop.row(b), float(fit[b])
        trace[t - 1] = best_fit
        stats.append(dict(
            sweeps=evaluate.sweeps - sweeps0,
            evaluations=evaluate.evaluations - evals0,
            similarity_comparisons=comparisons,
            diversity=div.varsigma,
        ))
        if callback is not None:
            callback(t, best_fit)

    return GAResult(best, best_fit, trace, pop, fit, stats)
