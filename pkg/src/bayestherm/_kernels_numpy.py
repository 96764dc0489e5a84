"""Pure-numpy fallback for the grid kernels.

Same functions and semantics as ``_kernels_numba``; the scan stage is
vectorized over all candidate gaps at once, golden-section refinement
evaluates one gap per step on the active window.
"""

import math

import numpy as np

GOLDEN = 0.6180339887498949  # (sqrt(5) - 1) / 2


def active_window(mass, tail):
    """Smallest index slice [lo, hi) whose complement carries at most
    ``tail`` probability mass on each side."""
    n = mass.shape[0]
    c = np.cumsum(mass)
    lo = int(np.searchsorted(c, tail, side="right"))
    lo = min(lo, n - 1)
    suffix = np.cumsum(mass[::-1])
    k = int(np.searchsorted(suffix, tail, side="right"))
    hi = max(n - k, lo + 1)
    return lo, hi


def _sigmoid(t):
    out = np.empty_like(t)
    pos = t >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    z = np.exp(t[~pos])
    out[~pos] = z / (1.0 + z)
    return out


def single_shot_emsle_two_level(mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot):
    """Expected posterior variance of log theta after one binary outcome."""
    p = _sigmoid(log_deg - gap * inv_theta[lo:hi])
    mw = mass[lo:hi] * p
    e1 = float(mw.sum())
    m1 = float(np.dot(mw, log_theta[lo:hi]))
    obj = s2_tot
    if e1 > 0.0:
        obj -= m1 * m1 / e1
    e0 = 1.0 - e1
    if e0 > 0.0:
        m0 = m_tot - m1
        obj -= m0 * m0 / e0
    return obj


def expected_heat_capacity_two_level(mass, inv_theta, lo, hi, log_deg, gap):
    """Posterior-averaged heat capacity of the two-level probe."""
    x = gap * inv_theta[lo:hi]
    z = np.exp(-np.abs(log_deg - x))
    pq = z / (1.0 + z) ** 2
    return float(np.dot(mass[lo:hi], x * x * pq))


def _objective(mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot, objective_id):
    if objective_id == 0:
        return single_shot_emsle_two_level(
            mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot
        )
    return -expected_heat_capacity_two_level(mass, inv_theta, lo, hi, log_deg, gap)


def _scan_objectives(mass, inv_theta, log_theta, lo, hi, log_deg, gaps, m_tot, s2_tot, objective_id):
    # one (n_scan, window) sweep instead of a Python loop over gaps
    t = log_deg - np.outer(gaps, inv_theta[lo:hi])
    if objective_id == 0:
        p = _sigmoid(t)
        mw = p * mass[lo:hi]
        e1 = mw.sum(axis=1)
        m1 = mw @ log_theta[lo:hi]
        obj = np.full(gaps.shape, s2_tot)
        np.subtract(obj, np.where(e1 > 0.0, m1 * m1 / np.where(e1 > 0.0, e1, 1.0), 0.0), out=obj)
        e0 = 1.0 - e1
        m0 = m_tot - m1
        obj -= np.where(e0 > 0.0, m0 * m0 / np.where(e0 > 0.0, e0, 1.0), 0.0)
        return obj
    z = np.exp(-np.abs(t))
    pq = z / (1.0 + z) ** 2
    x = np.outer(gaps, inv_theta[lo:hi])
    return -((x * x * pq) @ mass[lo:hi])


def optimize_gap_two_level(
    mass,
    inv_theta,
    log_theta,
    lo,
    hi,
    log_deg,
    eps_lo,
    eps_hi,
    n_scan,
    rel_tol,
    objective_id,
    m_tot,
    s2_tot,
):
    """Gap minimizing the selected objective over [eps_lo, eps_hi]."""
    ulo = math.log(eps_lo)
    uhi = math.log(eps_hi)
    step = (uhi - ulo) / (n_scan - 1)
    us = ulo + step * np.arange(n_scan)
    vals = _scan_objectives(
        mass, inv_theta, log_theta, lo, hi, log_deg, np.exp(us), m_tot, s2_tot, objective_id
    )
    best_j = int(np.argmin(vals))
    ja = best_j - 1 if best_j > 0 else 0
    jb = best_j + 1 if best_j < n_scan - 1 else n_scan - 1
    a = ulo + step * ja
    b = ulo + step * jb

    def f(u):
        return _objective(
            mass, inv_theta, log_theta, lo, hi, log_deg, math.exp(u), m_tot, s2_tot, objective_id
        )

    h = b - a
    x1 = b - GOLDEN * h
    x2 = a + GOLDEN * h
    f1 = f(x1)
    f2 = f(x2)
    while h > rel_tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            h = b - a
            x1 = b - GOLDEN * h
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            h = b - a
            x2 = a + GOLDEN * h
            f2 = f(x2)
    return math.exp(0.5 * (a + b))
