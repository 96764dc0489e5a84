"""numba-compiled grid kernels for the two-level measurement model.

These are the hot inner loops of the adaptive protocol: a fused
single-pass objective over the posterior grid and the scan-plus-golden
gap search built on it.  Signatures mirror ``_kernels_numpy`` exactly.
"""

import math

from numba import njit

GOLDEN = 0.6180339887498949  # (sqrt(5) - 1) / 2


@njit(cache=True, nogil=True)
def active_window(mass, tail):
    """Smallest index slice [lo, hi) whose complement carries at most
    ``tail`` probability mass on each side."""
    n = mass.shape[0]
    lo = 0
    acc = 0.0
    while lo < n - 1 and acc + mass[lo] <= tail:
        acc += mass[lo]
        lo += 1
    hi = n
    acc = 0.0
    while hi > lo + 1 and acc + mass[hi - 1] <= tail:
        acc += mass[hi - 1]
        hi -= 1
    return lo, hi


@njit(cache=True, nogil=True)
def single_shot_emsle_two_level(mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot):
    """Expected posterior variance of log theta after one binary outcome.

    Uses the identity  sum_x e_x * msle_x = S2 - sum_x M_x^2 / e_x  with
    M_x, e_x the first moment and evidence of outcome x; only the excited
    branch needs a grid pass since the two likelihoods sum to one.
    """
    e1 = 0.0
    m1 = 0.0
    for i in range(lo, hi):
        t = log_deg - gap * inv_theta[i]
        if t >= 0.0:
            p = 1.0 / (1.0 + math.exp(-t))
        else:
            z = math.exp(t)
            p = z / (1.0 + z)
        mw = mass[i] * p
        e1 += mw
        m1 += mw * log_theta[i]
    obj = s2_tot
    if e1 > 0.0:
        obj -= m1 * m1 / e1
    e0 = 1.0 - e1
    if e0 > 0.0:
        m0 = m_tot - m1
        obj -= m0 * m0 / e0
    return obj


@njit(cache=True, nogil=True)
def expected_heat_capacity_two_level(mass, inv_theta, lo, hi, log_deg, gap):
    """Posterior-averaged heat capacity of the two-level probe,
    C(theta) = (gap/theta)^2 p (1 - p)."""
    acc = 0.0
    for i in range(lo, hi):
        x = gap * inv_theta[i]
        z = math.exp(-abs(log_deg - x))
        pq = z / ((1.0 + z) * (1.0 + z))
        acc += mass[i] * x * x * pq
    return acc


@njit(cache=True, nogil=True)
def _objective(mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot, objective_id):
    if objective_id == 0:
        return single_shot_emsle_two_level(
            mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot
        )
    return -expected_heat_capacity_two_level(mass, inv_theta, lo, hi, log_deg, gap)


@njit(cache=True, nogil=True)
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
    """Gap minimizing the selected objective over [eps_lo, eps_hi].

    Coarse scan on a log-spaced grid, then golden-section refinement of the
    bracketing cell pair in log-gap space down to ``rel_tol``.
    """
    ulo = math.log(eps_lo)
    uhi = math.log(eps_hi)
    step = (uhi - ulo) / (n_scan - 1)
    best = math.inf
    best_j = 0
    for j in range(n_scan):
        v = _objective(
            mass, inv_theta, log_theta, lo, hi, log_deg,
            math.exp(ulo + step * j), m_tot, s2_tot, objective_id,
        )
        if v < best:
            best = v
            best_j = j
    ja = best_j - 1 if best_j > 0 else 0
    jb = best_j + 1 if best_j < n_scan - 1 else n_scan - 1
    a = ulo + step * ja
    b = ulo + step * jb
    h = b - a
    x1 = b - GOLDEN * h
    x2 = a + GOLDEN * h
    f1 = _objective(mass, inv_theta, log_theta, lo, hi, log_deg,
                    math.exp(x1), m_tot, s2_tot, objective_id)
    f2 = _objective(mass, inv_theta, log_theta, lo, hi, log_deg,
                    math.exp(x2), m_tot, s2_tot, objective_id)
    while h > rel_tol:
        if f1 <= f2:
            b = x2
            x2 = x1
            f2 = f1
            h = b - a
            x1 = b - GOLDEN * h
            f1 = _objective(mass, inv_theta, log_theta, lo, hi, log_deg,
                            math.exp(x1), m_tot, s2_tot, objective_id)
        else:
            a = x1
            x1 = x2
            f1 = f2
            h = b - a
            x2 = a + GOLDEN * h
            f2 = _objective(mass, inv_theta, log_theta, lo, hi, log_deg,
                            math.exp(x2), m_tot, s2_tot, objective_id)
    return math.exp(0.5 * (a + b))
