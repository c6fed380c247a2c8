"""Multi-slope LoS/NLoS channel gains and NOMA uplink rates.

BS and subchannel arguments use the same 1-based labels as assignment
genes; IMD indices are 0-based positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LinkState:
    distance: float
    gain: float
    slope: int
    los: bool | None  # None when the gain is the LoS/NLoS expectation


def los_probability(distance, threshold):
    """Probability that the LoS component exists at ``distance``.

    Linear decay from 1 at the origin to 0 at ``threshold``; works on scalars
    and arrays.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    p = np.where(d <= threshold, 1.0 - d / threshold, 0.0)
    return float(p) if p.ndim == 0 else p


def select_slope(distance, slopes):
    """Index of the active slope for ``distance`` (ladder over the first J-1 thresholds)."""
    ladder = np.asarray(slopes.thresholds[:-1], dtype=float)
    # slope j covers (ladder[j-1], ladder[j]]
    return np.searchsorted(ladder, distance, side="left")


def _branch_gain(distance, slopes, j, los):
    if los:
        return slopes.h_ls_ref[j] * distance ** (-slopes.gamma_ls[j])
    return slopes.h_nls_ref[j] * distance ** (-slopes.gamma_nls[j])


def channel_gain(distance, slopes, rng=None, *, los=None, mode="sample"):
    """Gain of one link plus the frozen draw that produced it.

    ``los`` forces the branch; otherwise ``mode="sample"`` draws it from
    ``rng`` and ``mode="expected"`` returns the probability-weighted mix.
    """
    if distance <= 0:
        raise ValueError("pathloss undefined at distance <= 0")
    j = int(select_slope(distance, slopes))
    if los is None and mode == "expected":
        p = los_probability(distance, slopes.thresholds[j])
        g = p * _branch_gain(distance, slopes, j, True) + (1 - p) * _branch_gain(distance, slopes, j, False)
        return g, LinkState(distance, g, j, None)
    if los is None:
        if rng is None:
            raise ValueError("sampling mode needs an rng")
        los = bool(rng.random() < los_probability(distance, slopes.thresholds[j]))
    g = _branch_gain(distance, slopes, j, bool(los))
    return g, LinkState(distance, g, j, bool(los))


def link_gains(distances, slopes, uniforms=None, mode="sample"):
    """Vectorised ``channel_gain`` over an array of distances.

    ``uniforms`` (same shape) supplies the LoS draws in sample mode; a link is
    LoS when its uniform falls below the LoS probability.

    Returns ``(gains, los, slope_index)``; ``los`` is all-False in expected mode.
    """
    d = np.asarray(distances, dtype=float)
    if np.any(d <= 0):
        raise ValueError("pathloss undefined at distance <= 0")
    j = select_slope(d, slopes)
    h_ls = np.asarray(slopes.h_ls_ref)[j] * d ** (-np.asarray(slopes.gamma_ls)[j])
    h_nls = np.asarray(slopes.h_nls_ref)[j] * d ** (-np.asarray(slopes.gamma_nls)[j])
    thr = np.asarray(slopes.thresholds, dtype=float)[j]
    p = np.where(d <= thr, 1.0 - d / thr, 0.0)
    if mode == "expected":
        return p * h_ls + (1 - p) * h_nls, np.zeros(d.shape, dtype=bool), j
    los = np.asarray(uniforms) < p
    return np.where(los, h_ls, h_nls), los, j


def interference_set(scenario, assignment, n, s, k):
    """IMDs whose signal interferes with IMD ``k`` on subchannel ``s`` of BS ``n``.

    Members share the subchannel, are associated with a BS in ``n``'s
    cluster and reach ``n`` with a gain no larger than ``k``'s own.
    """
    cluster = scenario.cluster_of_bs
    h = scenario.gains
    members = []
    for kp in range(scenario.K):
        if kp == k:
            continue
        if int(assignment.z[kp]) != s:
            continue
        if cluster[int(assignment.x[kp]) - 1] != cluster[n - 1]:
            continue
        if h[n - 1, kp] <= h[n - 1, k]:
            members.append(kp)
    return members


def uplink_rate(scenario, assignment, n, s, k):
    """Achievable uplink rate (bit/s) of IMD ``k`` on subchannel ``s`` of BS ``n``."""
    p_k = float(assignment.p[k])
    if p_k == 0:
        return 0.0
    h = scenario.gains
    interference = sum(float(assignment.p[kp]) * h[n - 1, kp] for kp in interference_set(scenario, assignment, n, s, k))
    sinr = p_k * h[n - 1, k] / (interference + scenario.noise_power)
    return scenario.config.w * math.log2(1.0 + sinr)


def uplink_rates_batch(gains, cluster_of_bs, w, noise_power, x, z, p):
    """Rates of every IMD towards its selected BS/subchannel, batched.

    ``x``, ``z``, ``p`` have shape ``(B, K)``; returns ``(B, K)``.
    """
    B, K = x.shape
    xi = x - 1
    # h_rx[b, k, k'] = gain of IMD k' at the BS selected by IMD k
    h_rx = gains[xi[:, :, None], np.arange(K)[None, None, :]]
    own = gains[xi, np.arange(K)[None, :]]
    cl = cluster_of_bs[xi]
    mask = (z[:, :, None] == z[:, None, :]) & (cl[:, :, None] == cl[:, None, :])
    mask &= h_rx <= own[:, :, None]
    mask &= ~np.eye(K, dtype=bool)[None]
    interference = np.einsum("bkj,bj->bk", np.where(mask, h_rx, 0.0), p)
    rates = w * np.log2(1.0 + p * own / (interference + noise_power))
    return np.where(p > 0, rates, 0.0)
