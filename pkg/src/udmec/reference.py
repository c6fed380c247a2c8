"""Slow, literal re-implementation of the system model.

Everything here is written as explicit loops over one-hot indicator
products (``x[n, k]``, ``c[n, k, m]``, ``u[n, k, m]``) so it shares no code
path with :mod:`udmec.sysmodel`. Tests use it as an oracle.
"""

import math

import numpy as np


def one_hot(scenario, assignment):
    """Indicator tensors ``x[n, k]``, ``z[s, k]``, ``u[n, k, m]``, ``v[l, k, m]``."""
    N, K, M, S, L = scenario.N, scenario.K, scenario.M, scenario.S, scenario.L
    x = np.zeros((N, K), dtype=int)
    z = np.zeros((S, K), dtype=int)
    u = np.zeros((N, K, M), dtype=int)
    v = np.zeros((L, K, M), dtype=int)
    for k in range(K):
        x[assignment.x[k] - 1, k] = 1
        z[assignment.z[k] - 1, k] = 1
        for m in range(M):
            if assignment.u[k, m] > 0:
                u[assignment.u[k, m] - 1, k, m] = 1
            v[assignment.v[k, m] - 1, k, m] = 1
    return x, z, u, v


def backhaul_indicator_expanded(c, x, u, k, m):
    """Three-term indicator sum before simplification."""
    N = c.shape[0]
    total = 0
    for n in range(N):
        others = [q for q in range(N) if q != n]
        total += x[n, k] * c[n, k, m] * sum((1 - c[q, k, m]) * u[q, k, m] for q in others)
        total += x[n, k] * (1 - c[n, k, m]) * u[n, k, m] * sum(c[q, k, m] for q in others)
        total += x[n, k] * (1 - c[n, k, m]) * sum((1 - c[q, k, m]) * u[q, k, m] for q in others)
    return total


def backhaul_indicator_simplified(c, x, u, k, m):
    N = c.shape[0]
    total = 0
    for n in range(N):
        others = [q for q in range(N) if q != n]
        total += x[n, k] * sum((1 - c[q, k, m]) * u[q, k, m] for q in others)
        total += x[n, k] * (1 - c[n, k, m]) * u[n, k, m] * sum(c[q, k, m] for q in others)
    return total


def remote_time_expanded(c, x, u, k, m, tau_mec):
    """Six-case execution-time sum; ``tau_mec[n]`` is the time the task would take at BS ``n``."""
    N = c.shape[0]
    total = 0.0
    for n in range(N):
        others = [q for q in range(N) if q != n]
        total += x[n, k] * (1 - c[n, k, m]) * u[n, k, m] * tau_mec[n]
        total += x[n, k] * c[n, k, m] * u[n, k, m] * tau_mec[n]
        total += x[n, k] * (1 - c[n, k, m]) * sum(c[q, k, m] * u[q, k, m] * tau_mec[q] for q in others)
        total += x[n, k] * (1 - c[n, k, m]) * sum((1 - c[q, k, m]) * u[q, k, m] * tau_mec[q] for q in others)
        total += x[n, k] * c[n, k, m] * sum(c[q, k, m] * u[q, k, m] * tau_mec[q] for q in others)
        total += x[n, k] * c[n, k, m] * sum((1 - c[q, k, m]) * u[q, k, m] * tau_mec[q] for q in others)
    return total


def remote_time_simplified(u, k, m, tau_mec):
    return sum(u[n, k, m] * tau_mec[n] for n in range(u.shape[0]))


def upload_indicator(c, x, u, k, m):
    """Radio-upload indicator.

    Direct upload to the selected BS needs the task uncached everywhere;
    upload towards an auxiliary executor needs it uncached at both ends.
    """
    N = c.shape[0]
    total = 0
    for n in range(N):
        others = [q for q in range(N) if q != n]
        nowhere_else = math.prod(1 - c[q, k, m] for q in others)
        total += x[n, k] * (1 - c[n, k, m]) * u[n, k, m] * nowhere_else
        total += x[n, k] * (1 - c[n, k, m]) * sum((1 - c[q, k, m]) * u[q, k, m] for q in others)
    return total


def _rate(scenario, xo, zo, p, k):
    """Uplink rate of IMD k, written from the membership rules directly."""
    cfg = scenario.config
    h = scenario.gains
    n = int(np.argmax(xo[:, k]))
    s = int(np.argmax(zo[:, k]))
    my_cluster = scenario.cluster_of_bs[n]
    interf = 0.0
    for q in range(scenario.K):
        if q == k or zo[s, q] == 0:
            continue
        bs_q = int(np.argmax(xo[:, q]))
        if scenario.cluster_of_bs[bs_q] != my_cluster:
            continue
        if h[n, q] <= h[n, k]:
            interf += p[q] * h[n, q]
    noise = 10 ** (cfg.noise_psd_dbm_hz / 10) / 1000 * cfg.w
    if p[k] == 0:
        return 0.0
    return cfg.w * math.log2(1 + p[k] * h[n, k] / (interf + noise))


def evaluate_reference(scenario, assignment):
    """Per-task delays ``(K, M)`` and per-IMD energies ``(K,)``."""
    N, K, M, L = scenario.N, scenario.K, scenario.M, scenario.L
    cfg = scenario.config
    xo, zo, uo, vo = one_hot(scenario, assignment)
    c = np.asarray(scenario.cache, dtype=int)
    eps = scenario.crypto.enc_cycles
    eps_dot = scenario.crypto.dec_cycles
    eps_ddot = scenario.crypto.energy_per_bit
    p = assignment.p

    def f_local(k, m):
        f = assignment.f_loc
        return f[k, m] if np.ndim(f) == 2 else f[k]

    def sel(vec_l, k, m):
        return sum(vo[l, k, m] * vec_l[l] for l in range(L))

    # proportional edge capacity
    demand = np.zeros((K, M))
    for k in range(K):
        for m in range(M):
            demand[k, m] = scenario.ell[k, m] + sel(eps_dot, k, m) * scenario.d[k, m]
    f_mec = np.zeros((N, K, M))
    for n in range(N):
        tot = sum(uo[n, kk, mm] * demand[kk, mm] for kk in range(K) for mm in range(M))
        for k in range(K):
            for m in range(M):
                if uo[n, k, m]:
                    f_mec[n, k, m] = cfg.f_mmax * demand[k, m] / tot

    delay = np.zeros((K, M))
    energy = np.zeros(K)
    for k in range(K):
        r = _rate(scenario, xo, zo, p, k)
        for m in range(M):
            d = scenario.d[k, m]
            ell = scenario.ell[k, m]
            f = f_local(k, m)
            offl = sum(uo[n, k, m] for n in range(N))
            t_locc = ell * (1 - offl) / f
            e_locc = cfg.alpha * ell * (1 - offl) * f * f
            t_loce = offl * sel(eps, k, m) * d / f
            e_loce = offl * sel(eps_ddot, k, m) * d
            up = upload_indicator(c, xo, uo, k, m)
            t_up = 0.0
            if up:
                t_up = math.inf if r == 0 else d / r
            e_up = p[k] * t_up if up else 0.0
            t_bh = backhaul_indicator_simplified(c, xo, uo, k, m) * d / cfg.r_bh
            t_mecc = 0.0
            t_mecd = 0.0
            for n in range(N):
                if uo[n, k, m]:
                    t_mecc += ell / f_mec[n, k, m]
                    t_mecd += sel(eps_dot, k, m) * d / f_mec[n, k, m]
            delay[k, m] = t_locc + t_loce + t_up + t_bh + t_mecd + t_mecc
            energy[k] += e_locc + e_loce + e_up
    return delay, energy
