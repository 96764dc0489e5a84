"""Analytic precision bounds on the inverse expected squared log error.

For a prior p, n probes of dimension d per round and m rounds (total
dimension D = d^n per round), the package assembles:

  ultimate (tight)      Q[p] + m * C_D
  ultimate (asymptotic) Q[p] + m * n^2 log^2(d) / 4
  non-adaptive no-go    Q[p] + f[p] * m * n * log d
  non-adaptive (alt)    Q[p] + g[p] * m * log(d^n)

Q, f and g are the prior functionals from ``priors``; C_D is the
dimension-constrained heat-capacity maximum from ``probe``.  The two
non-adaptive ceilings are complementary (which is tighter depends on the
prior), so reports carry both.  The no-go derivations assume the prior
density vanishes at the support boundaries; evaluating them for priors
that do not (e.g. the uniform limit) raises a warning, not an error.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryConditionWarning
from .priors import (
    GridDistribution,
    alt_functional_g,
    bayesian_information_q,
    no_go_functional_f,
)
from .probe import ProbeSpectrum, heat_capacity, max_heat_capacity_cd

__all__ = [
    "BoundsReport",
    "ultimate_bound",
    "no_go_bound",
    "alt_no_go_bound",
    "gamma_bar",
    "compute_bounds_report",
]

# density above this at the first/last interior node counts as a
# boundary-condition violation for the no-go derivations
BOUNDARY_DENSITY_TOL = 1e-8


@dataclass(frozen=True)
class BoundsReport:
    """Prior functionals and assembled inverse-error ceilings for one
    (n, m, d) configuration."""

    q_prior: float
    c_d: float
    f_prior: float
    g_prior: float
    ultimate_inverse: float
    heisenberg_inverse: float
    no_go_inverse: float
    alt_no_go_inverse: float

    def as_dict(self) -> dict:
        return {
            "q_prior": self.q_prior,
            "c_d": self.c_d,
            "f_prior": self.f_prior,
            "g_prior": self.g_prior,
            "ultimate_inverse": self.ultimate_inverse,
            "heisenberg_inverse": self.heisenberg_inverse,
            "no_go_inverse": self.no_go_inverse,
            "alt_no_go_inverse": self.alt_no_go_inverse,
        }

    @property
    def operative_non_adaptive_inverse(self) -> float:
        """The tighter of the two non-adaptive ceilings."""
        return min(self.no_go_inverse, self.alt_no_go_inverse)


def _check_boundary_vanishing(dist: GridDistribution, context: str) -> None:
    p1 = float(dist.weights[1])
    p2 = float(dist.weights[-2])
    if p1 > BOUNDARY_DENSITY_TOL or p2 > BOUNDARY_DENSITY_TOL:
        warnings.warn(
            f"{context} assumes a prior density vanishing at the support "
            f"boundaries; interior edge densities are ({p1:.3g}, {p2:.3g})",
            BoundaryConditionWarning,
            stacklevel=3,
        )


def ultimate_bound(dist: GridDistribution, n: int, m: int, d: int = 2) -> tuple[float, float]:
    """(Q + m C_{d^n},  Q + m n^2 log^2(d) / 4): the tight ceiling and its
    large-n asymptotic form."""
    q = bayesian_information_q(dist)
    c_d = max_heat_capacity_cd(d**n)
    tight = q + m * c_d
    asymptotic = q + m * (n * math.log(d)) ** 2 / 4.0
    return tight, asymptotic


def no_go_bound(dist: GridDistribution, n: int, m: int, d: int = 2) -> float:
    """Non-adaptive ceiling Q + f[p] * m * n * log d."""
    _check_boundary_vanishing(dist, "the non-adaptive no-go bound")
    q = bayesian_information_q(dist)
    return q + no_go_functional_f(dist) * m * n * math.log(d)


def alt_no_go_bound(dist: GridDistribution, n: int, m: int, d: int = 2) -> float:
    """Alternative non-adaptive ceiling Q + g[p] * m * log(d^n)."""
    _check_boundary_vanishing(dist, "the alternative non-adaptive bound")
    q = bayesian_information_q(dist)
    return q + alt_functional_g(dist) * m * n * math.log(d)


def gamma_bar(dist: GridDistribution, spectrum: ProbeSpectrum, m: int) -> float:
    """m times the prior-averaged heat capacity of a fixed probe."""
    c_vals = np.array([heat_capacity(spectrum, th) for th in dist.grid])
    return m * float(np.dot(dist.mass, c_vals))


def compute_bounds_report(dist: GridDistribution, n: int, m: int, d: int = 2) -> BoundsReport:
    """Assemble every bound for one configuration."""
    q = bayesian_information_q(dist)
    c_d = max_heat_capacity_cd(d**n)
    f_p = no_go_functional_f(dist)
    g_p = alt_functional_g(dist)
    log_d = math.log(d)
    return BoundsReport(
        q_prior=q,
        c_d=c_d,
        f_prior=f_p,
        g_prior=g_p,
        ultimate_inverse=q + m * c_d,
        heisenberg_inverse=q + m * (n * log_d) ** 2 / 4.0,
        no_go_inverse=q + f_p * m * n * log_d,
        alt_no_go_inverse=q + g_p * m * n * log_d,
    )
