"""Delay, energy and security-cost evaluation of a candidate assignment.

The batched evaluator :func:`evaluate_batch` is the workhorse used by the
solvers; it scores ``B`` assignments at once. The per-task helpers further
down exist for inspection and testing and agree with it exactly.

Route rules per task (``x`` selected BS, ``u`` executing BS, ``c`` cache):

* upload over the radio link when the task is offloaded, not cached at the
  selected BS, not cached at the executing BS, and either executed away
  from the selected BS or not cached anywhere;
* backhaul when executed away from the selected BS at a BS without a cached
  copy, or executed at the selected BS while the only copy sits at another
  BS.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import channel
from .config import VARTHETA

# deadline checks tolerate rounding in f = ell / tau_max style solutions
DEADLINE_RTOL = 1e-9


@dataclass(frozen=True)
class PenaltyConfig:
    eta: float = 1e3  # per USD of breach-cost excess
    eta_tilde: float = 1e3  # per second of deadline excess

    def __post_init__(self):
        if not (self.eta > 0 and self.eta_tilde > 0):
            raise ValueError("penalty weights must be positive")


@dataclass
class Assignment:
    """One candidate decision.

    ``x``, ``z``: per IMD, 1-based BS / subchannel. ``u``: per task, 0 for
    local execution else the 1-based executing BS. ``v``: per task, 1-based
    crypto algorithm. ``f_loc``: per IMD (or per task), cycles/s. ``p``: per
    IMD, watts.
    """

    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    v: np.ndarray
    f_loc: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.int64)
        self.z = np.asarray(self.z, dtype=np.int64)
        self.u = np.asarray(self.u, dtype=np.int64)
        self.v = np.asarray(self.v, dtype=np.int64)
        self.f_loc = np.asarray(self.f_loc, dtype=float)
        self.p = np.asarray(self.p, dtype=float)

    def validate(self, scenario, *, bound_tol=1e-12):
        K, M, N = scenario.K, scenario.M, scenario.N
        problems = []
        if self.x.shape != (K,) or np.any((self.x < 1) | (self.x > N)):
            problems.append("x must hold K values in 1..N")
        if self.z.shape != (K,) or np.any((self.z < 1) | (self.z > scenario.S)):
            problems.append("z must hold K values in 1..S")
        if self.u.shape != (K, M) or np.any((self.u < 0) | (self.u > N)):
            problems.append("u must hold KxM values in 0..N")
        if self.v.shape != (K, M) or np.any((self.v < 1) | (self.v > scenario.L)):
            problems.append("v must hold KxM values in 1..L")
        f = self.f_loc if self.f_loc.ndim == 2 else self.f_loc[:, None]
        if self.f_loc.shape not in ((K,), (K, M)):
            problems.append("f_loc must have shape (K,) or (K, M)")
        elif np.any(f < VARTHETA * (1 - bound_tol)) or np.any(f > scenario.f_lmax[:, None] * (1 + bound_tol)):
            problems.append("f_loc outside [vartheta, f_lmax]")
        if self.p.shape != (K,) or np.any(self.p < VARTHETA * (1 - bound_tol)) or np.any(self.p > scenario.p_max * (1 + bound_tol)):
            problems.append("p outside [vartheta, p_max]")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def copy(self):
        return Assignment(self.x.copy(), self.z.copy(), self.u.copy(), self.v.copy(), self.f_loc.copy(), self.p.copy())


# ---------------------------------------------------------------------------
# routes


@dataclass(frozen=True)
class Route:
    name: str
    upload: bool
    backhaul: bool
    site: int  # executing BS (1-based), 0 = local


ROUTE_NAMES = (
    "local",
    "cached-at-selected",
    "backhaul-to-auxiliary",
    "cached-at-auxiliary",
    "direct-at-selected",
    "backhaul-from-auxiliary",
    "upload-then-backhaul",
)


def route_flags(cache, x, u):
    """Upload and backhaul indicators, broadcast over leading batch dims.

    ``cache`` is ``(N, K, M)``, ``x`` is ``(..., K)``, ``u`` is ``(..., K, M)``.
    """
    K, M = cache.shape[1:]
    kk = np.arange(K)[:, None]
    mm = np.arange(M)[None, :]
    xs = np.broadcast_to(x[..., :, None], u.shape)
    off = u > 0
    c_sel = cache[xs - 1, kk, mm] > 0
    c_exec = cache[np.maximum(u, 1) - 1, kk, mm] > 0
    c_any = cache.sum(0) > 0
    at_sel = u == xs
    upload = off & ~c_sel & ~c_exec & (~at_sel | ~c_any)
    backhaul = off & ((~at_sel & ~c_exec) | (at_sel & ~c_sel & c_any))
    return upload, backhaul


def offload_route(scenario, assignment, k, m):
    """Route of task ``(k, m)``, one of :data:`ROUTE_NAMES`."""
    site = int(assignment.u[k, m])
    if site == 0:
        return Route("local", False, False, 0)
    sel = int(assignment.x[k])
    cache = scenario.cache
    c_sel = bool(cache[sel - 1, k, m])
    c_exec = bool(cache[site - 1, k, m])
    c_any = bool(cache[:, k, m].any())
    if site == sel:
        if c_sel:
            return Route("cached-at-selected", False, False, site)
        if c_any:
            return Route("backhaul-from-auxiliary", False, True, site)
        return Route("direct-at-selected", True, False, site)
    if c_exec:
        return Route("cached-at-auxiliary", False, False, site)
    if c_sel:
        return Route("backhaul-to-auxiliary", False, True, site)
    return Route("upload-then-backhaul", True, True, site)


# ---------------------------------------------------------------------------
# batched evaluation


@dataclass
class BatchEval:
    """Per-task components with a leading batch axis ``B``."""

    tau_locc: np.ndarray
    tau_loce: np.ndarray
    tau_up: np.ndarray
    tau_bh: np.ndarray
    tau_mecd: np.ndarray
    tau_mecc: np.ndarray
    e_locc: np.ndarray
    e_loce: np.ndarray
    e_up: np.ndarray
    phi: np.ndarray
    f_mec: np.ndarray
    rate: np.ndarray  # (B, K)
    tau: np.ndarray
    energy_device: np.ndarray  # (B, K)
    psi: np.ndarray  # (B, K)
    delay_violation: np.ndarray
    cost_violation: np.ndarray  # (B, K)
    objective: np.ndarray  # (B,)
    fitness: np.ndarray  # (B,)
    upload: np.ndarray
    backhaul: np.ndarray


def edge_loads(u, A, N):
    """Sum of ``A`` over tasks executed at each BS; returns ``(B, N + 1)``, column 0 = local."""
    B = u.shape[0]
    load = np.zeros((B, N + 1))
    b_idx = np.broadcast_to(np.arange(B)[:, None, None], u.shape)
    np.add.at(load, (b_idx, u), A)
    return load


def evaluate_batch(scenario, x, z, u, v, f_loc, p, penalties=None):
    """Score a batch of assignments given as raw gene arrays.

    Shapes: ``x, z, p`` ``(B, K)``; ``u, v`` ``(B, K, M)``; ``f_loc`` ``(B, K)``
    or ``(B, K, M)``.
    """
    pen = penalties or PenaltyConfig()
    x = np.asarray(x, dtype=np.int64)
    z = np.asarray(z, dtype=np.int64)
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    f_loc = np.asarray(f_loc, dtype=float)
    if f_loc.ndim == 2:
        f_loc = f_loc[..., None]
    B, K, M = u.shape
    N = scenario.N
    cfg = scenario.config
    crypto = scenario.crypto

    d, ell = scenario.d, scenario.ell
    off = u > 0
    enc = crypto.enc_cycles[v - 1]
    dec = crypto.dec_cycles[v - 1]
    ebit = crypto.energy_per_bit[v - 1]

    upload, backhaul = route_flags(scenario.cache, x, u)
    rate = channel.uplink_rates_batch(scenario.gains, scenario.cluster_of_bs, cfg.w, scenario.noise_power, x, z, p)
    r = rate[:, :, None]
    with np.errstate(divide="ignore"):
        tau_up = np.where(upload, d / np.where(r > 0, r, 0.0), 0.0)
    tau_bh = np.where(backhaul, d / cfg.r_bh, 0.0)

    A = ell + dec * d
    load = edge_loads(u, np.where(off, A, 0.0), N)
    f_mmax = scenario.f_mmax
    f_mmax_ext = np.concatenate([[0.0], f_mmax])
    denom = np.take_along_axis(load, u.reshape(B, -1), axis=1).reshape(B, K, M)
    f_mec = np.where(off, f_mmax_ext[u] * A / np.where(off, denom, 1.0), 0.0)
    safe_mec = np.where(off, f_mec, 1.0)
    tau_mecc = np.where(off, ell / safe_mec, 0.0)
    tau_mecd = np.where(off, dec * d / safe_mec, 0.0)

    tau_locc = np.where(off, 0.0, ell / f_loc)
    tau_loce = np.where(off, enc * d / f_loc, 0.0)
    e_locc = np.where(off, 0.0, cfg.alpha * ell * f_loc**2)
    e_loce = np.where(off, ebit * d, 0.0)
    e_up = np.where(upload, p[:, :, None] * tau_up, 0.0)

    fail = scenario.failure_table()  # (K, M, L)
    kk = np.arange(K)[:, None]
    mm = np.arange(M)[None, :]
    phi = np.where(off, scenario.lam * fail[kk, mm, v - 1], 0.0)

    tau = tau_locc + tau_loce + tau_up + tau_bh + tau_mecd + tau_mecc
    energy_device = (e_locc + e_loce + e_up).sum(-1)
    psi = phi.sum(-1)
    delay_violation = np.maximum(tau - scenario.tau_max, 0.0)
    cost_violation = np.maximum(psi - cfg.psi_max, 0.0)
    objective = energy_device.sum(-1)
    with np.errstate(invalid="ignore"):
        fitness = (
            -objective
            - pen.eta * cost_violation.sum(-1)
            - pen.eta_tilde * delay_violation.sum((-1, -2))
        )
    fitness = np.where(np.isfinite(fitness), fitness, -np.inf)

    return BatchEval(
        tau_locc=tau_locc,
        tau_loce=tau_loce,
        tau_up=tau_up,
        tau_bh=tau_bh,
        tau_mecd=tau_mecd,
        tau_mecc=tau_mecc,
        e_locc=e_locc,
        e_loce=e_loce,
        e_up=e_up,
        phi=phi,
        f_mec=f_mec,
        rate=rate,
        tau=tau,
        energy_device=energy_device,
        psi=psi,
        delay_violation=delay_violation,
        cost_violation=cost_violation,
        objective=objective,
        fitness=fitness,
        upload=upload,
        backhaul=backhaul,
    )


# ---------------------------------------------------------------------------
# single-assignment report


@dataclass
class EvalReport:
    tau_locc: np.ndarray
    tau_loce: np.ndarray
    tau_up: np.ndarray
    tau_bh: np.ndarray
    tau_mecd: np.ndarray
    tau_mecc: np.ndarray
    tau: np.ndarray
    e_locc: np.ndarray
    e_loce: np.ndarray
    e_up: np.ndarray
    energy_device: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    delay_violation: np.ndarray
    cost_violation: np.ndarray
    objective: float
    fitness: float
    tsr: float
    csr: float
    routes: list = field(default_factory=list)

    @property
    def tec(self):
        return self.objective

    @property
    def td(self):
        return float(self.tau.sum())


def _deadline_met(tau, tau_max):
    return tau <= tau_max * (1 + DEADLINE_RTOL)


def success_ratios(tau, tau_max, psi, psi_max):
    """(TSR, CSR) for one assignment."""
    tsr = float(np.mean(_deadline_met(tau, tau_max).all(-1)))
    csr = float(np.mean(psi <= psi_max * (1 + DEADLINE_RTOL) + 1e-12))
    return tsr, csr


def evaluate(scenario, assignment, penalties=None):
    """Full :class:`EvalReport` for one assignment."""
    a = assignment
    be = _evaluate_one(scenario, a, penalties)
    one = {name: getattr(be, name)[0] for name in (
        "tau_locc", "tau_loce", "tau_up", "tau_bh", "tau_mecd", "tau_mecc", "tau",
        "e_locc", "e_loce", "e_up", "energy_device", "phi", "psi",
        "delay_violation", "cost_violation",
    )}
    tsr, csr = success_ratios(one["tau"], scenario.tau_max, one["psi"], scenario.config.psi_max)
    routes = [[offload_route(scenario, a, k, m).name for m in range(scenario.M)] for k in range(scenario.K)]
    return EvalReport(
        objective=float(be.objective[0]),
        fitness=float(be.fitness[0]),
        tsr=tsr,
        csr=csr,
        routes=routes,
        **one,
    )


def _evaluate_one(scenario, a, penalties=None):
    return evaluate_batch(scenario, a.x[None], a.z[None], a.u[None], a.v[None], a.f_loc[None], a.p[None], penalties)


def fitness(scenario, assignment, penalties=None):
    return float(_evaluate_one(scenario, assignment, penalties).fitness[0])


def objective(scenario, assignment):
    return float(_evaluate_one(scenario, assignment).objective[0])


def constraint_report(scenario, assignment, report=None):
    """Pass/fail per constraint C1..C12 plus TSR and CSR."""
    a = assignment
    rep = report or evaluate(scenario, a)
    K, M, N = scenario.K, scenario.M, scenario.N
    f = a.f_loc if a.f_loc.ndim == 2 else a.f_loc[:, None]
    checks = {
        "C1": bool(_deadline_met(rep.tau, scenario.tau_max).all()),
        "C2": bool(a.x.shape == (K,) and np.all((a.x >= 1) & (a.x <= N))),
        "C3": bool(a.x.shape == (K,)),  # one BS per IMD by encoding
        "C4": bool(a.z.shape == (K,) and np.all((a.z >= 1) & (a.z <= scenario.S))),
        "C5": bool(a.z.shape == (K,)),
        "C6": bool(np.all(rep.psi <= scenario.config.psi_max * (1 + DEADLINE_RTOL) + 1e-12)),
        "C7": bool(np.all((a.u >= 0) & (a.u <= N))),
        "C8": bool(a.u.shape == (K, M)),  # at most one execution site by encoding
        "C9": bool(np.all((a.v >= 1) & (a.v <= scenario.L))),
        "C10": bool(a.v.shape == (K, M)),
        "C11": bool(np.all((f >= VARTHETA * (1 - 1e-12)) & (f <= scenario.f_lmax[:, None] * (1 + 1e-12)))),
        "C12": bool(np.all((a.p >= VARTHETA * (1 - 1e-12)) & (a.p <= scenario.p_max * (1 + 1e-12)))),
    }
    return {"constraints": checks, "TSR": rep.tsr, "CSR": rep.csr}


# ---------------------------------------------------------------------------
# per-task operations


def _offloaded(u):
    u = np.asarray(u)
    return bool(u.sum() > 0) if u.ndim else bool(u > 0)


def local_compute_time(task, u, f_loc):
    return 0.0 if _offloaded(u) else task.ell / f_loc


def local_compute_energy(task, u, f_loc, alpha):
    return 0.0 if _offloaded(u) else alpha * task.ell * f_loc**2


def encrypt_time(task, u, v, f_loc, crypto):
    return crypto.enc_cycles[v - 1] * task.d / f_loc if _offloaded(u) else 0.0


def encrypt_energy(task, u, v, crypto):
    return crypto.energy_per_bit[v - 1] * task.d if _offloaded(u) else 0.0


def decrypt_time(task, u, v, f_mec, crypto):
    return crypto.dec_cycles[v - 1] * task.d / f_mec if _offloaded(u) else 0.0


def failure_probability(task, l, crypto):
    gap = task.rho - crypto.rho_dot[l - 1]
    return float(-math.expm1(-task.theta * gap)) if gap > 0 else 0.0


def breach_cost(task, u, v, crypto):
    return task.lam * failure_probability(task, v, crypto) if _offloaded(u) else 0.0


def device_breach_cost(scenario, assignment, k):
    return sum(
        breach_cost(scenario.task(k, m), assignment.u[k, m], assignment.v[k, m], scenario.crypto)
        for m in range(scenario.M)
    )


def _f_loc_of(assignment, k, m):
    f = assignment.f_loc
    return float(f[k, m] if f.ndim == 2 else f[k])


def upload_time(scenario, assignment, k, m):
    route = offload_route(scenario, assignment, k, m)
    if not route.upload:
        return 0.0
    r = channel.uplink_rate(scenario, assignment, int(assignment.x[k]), int(assignment.z[k]), k)
    return math.inf if r <= 0 else float(scenario.d[k, m]) / r


def upload_energy(scenario, assignment, k, m):
    t = upload_time(scenario, assignment, k, m)
    return float(assignment.p[k]) * t if t else 0.0


def backhaul_time(scenario, assignment, k, m):
    route = offload_route(scenario, assignment, k, m)
    return float(scenario.d[k, m]) / scenario.config.r_bh if route.backhaul else 0.0


def edge_capacity(scenario, assignment, n, k, m):
    """Capacity BS ``n`` grants task ``(k, m)``, proportional to its cycle demand."""
    dec = scenario.crypto.dec_cycles

    def demand(kk, mm):
        return scenario.ell[kk, mm] + dec[assignment.v[kk, mm] - 1] * scenario.d[kk, mm]

    total = sum(
        demand(kk, mm)
        for kk in range(scenario.K)
        for mm in range(scenario.M)
        if assignment.u[kk, mm] == n
    )
    return float(scenario.f_mmax[n - 1] * demand(k, m) / total)


def edge_compute_time(scenario, assignment, k, m):
    n = int(assignment.u[k, m])
    if n == 0:
        return 0.0
    return float(scenario.ell[k, m]) / edge_capacity(scenario, assignment, n, k, m)


def task_delay(scenario, assignment, k, m):
    task = scenario.task(k, m)
    u, v = int(assignment.u[k, m]), int(assignment.v[k, m])
    f = _f_loc_of(assignment, k, m)
    dec = 0.0
    if u:
        dec = decrypt_time(task, u, v, edge_capacity(scenario, assignment, u, k, m), scenario.crypto)
    return (
        local_compute_time(task, u, f)
        + encrypt_time(task, u, v, f, scenario.crypto)
        + upload_time(scenario, assignment, k, m)
        + backhaul_time(scenario, assignment, k, m)
        + dec
        + edge_compute_time(scenario, assignment, k, m)
    )


def device_energy(scenario, assignment, k):
    total = 0.0
    for m in range(scenario.M):
        task = scenario.task(k, m)
        u, v = int(assignment.u[k, m]), int(assignment.v[k, m])
        f = _f_loc_of(assignment, k, m)
        total += local_compute_energy(task, u, f, scenario.config.alpha)
        total += encrypt_energy(task, u, v, scenario.crypto)
        total += upload_energy(scenario, assignment, k, m)
    return total


# ---------------------------------------------------------------------------
# CSV export

REPORT_COLUMNS = (
    "scenario_seed", "algo", "k", "m", "route",
    "tau_locc", "tau_loce", "tau_up", "tau_bh", "tau_mecd", "tau_mecc", "tau",
    "e_locc", "e_loce", "e_up", "phi", "delay_violation", "cost_violation",
)


def report_rows(scenario, report, algo):
    """Rows in :data:`REPORT_COLUMNS` order; ``cost_violation`` is the IMD-level value."""
    rows = []
    for k in range(scenario.K):
        for m in range(scenario.M):
            rows.append([
                scenario.config.seed, algo, k + 1, m + 1, report.routes[k][m],
                *(float(getattr(report, c)[k, m]) for c in REPORT_COLUMNS[5:16]),
                float(report.delay_violation[k, m]),
                float(report.cost_violation[k]),
            ])
    return rows


def report_to_csv(scenario, report, algo):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for row in report_rows(scenario, report, algo):
        w.writerow([format(c, ".17g") if isinstance(c, float) else c for c in row])
    return buf.getvalue()
