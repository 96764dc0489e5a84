"""Probe spectra and their equilibrium thermodynamics.

A probe is described by its energy levels and degeneracies (k_B = 1, so
energies and temperatures share units; the ground state sits at energy 0).
All thermal quantities derive from the Gibbs weights g_l exp(-e_l / theta):
partition function Z, Massieu potential log Z, mean energy, heat capacity
(the energy variance over theta^2) and the thermal Fisher information
C / theta^2.

Degeneracies are stored as exact integer counts and enter every formula
through their logarithm, so effective dimensions as large as d^n with
n log d in the thousands neither overflow nor lose the level structure.

The module also provides the dimension-constrained extremal quantities:
the root xi_D of  exp(xi) = (D - 1)(xi + 2)/(xi - 2),  the resulting heat
capacity ceiling C_D = (xi_D / 2)^2 - 1, and the thermal-energy ceiling
theta * W((D - 1)/e) built on the Lambert W function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

__all__ = [
    "ProbeSpectrum",
    "ThermalState",
    "thermalize",
    "partition_function",
    "massieu_potential",
    "mean_energy",
    "heat_capacity",
    "fisher_information",
    "xi_d",
    "max_heat_capacity_cd",
    "max_thermal_energy_bound",
    "max_energy_per_temperature",
    "lambert_w",
    "make_effective_two_level",
]


@dataclass(frozen=True)
class ProbeSpectrum:
    """Energy levels (strictly increasing, ground state at 0) with integer
    degeneracies.  ``dimension`` is the total Hilbert-space dimension."""

    levels: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        if len(self.levels) < 1:
            raise ValueError("spectrum needs at least one level")
        energies = [float(e) for e, _ in self.levels]
        degs = [d for _, d in self.levels]
        if energies[0] != 0.0:
            raise ValueError(f"ground-state energy must be exactly 0, got {energies[0]}")
        if any(e2 <= e1 for e1, e2 in zip(energies, energies[1:])):
            raise ValueError("level energies must be strictly increasing")
        if any((not isinstance(d, int)) or d < 1 for d in degs):
            raise ValueError("degeneracies must be positive integers")
        dim = sum(degs)
        if dim < 2:
            raise ValueError(f"total dimension must be >= 2, got {dim}")
        object.__setattr__(self, "levels", tuple((float(e), int(d)) for e, d in self.levels))
        energy_arr = np.array(energies, dtype=float)
        energy_arr.setflags(write=False)
        # math.log handles arbitrarily large Python ints exactly enough
        log_degs = np.array([math.log(d) for d in degs], dtype=float)
        log_degs.setflags(write=False)
        object.__setattr__(self, "_energies", energy_arr)
        object.__setattr__(self, "_log_degeneracies", log_degs)
        object.__setattr__(self, "_dimension", dim)

    @property
    def energies(self) -> np.ndarray:
        return self._energies

    @property
    def log_degeneracies(self) -> np.ndarray:
        return self._log_degeneracies

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def num_levels(self) -> int:
        return len(self.levels)


@dataclass(frozen=True)
class ThermalState:
    """Occupation probabilities per level (degeneracy-summed) at theta."""

    spectrum: ProbeSpectrum
    theta: float
    level_probs: np.ndarray


def _require_positive_theta(theta: float) -> float:
    theta = float(theta)
    if not (theta > 0.0):
        raise DomainError(f"temperature must be positive, got {theta}")
    return theta


def _log_weights(spectrum: ProbeSpectrum, theta: float) -> np.ndarray:
    return spectrum.log_degeneracies - spectrum.energies / theta


def thermalize(spectrum: ProbeSpectrum, theta: float) -> ThermalState:
    """Gibbs state at theta: probs proportional to g_l exp(-e_l / theta).

    Weights are exponentiated after subtracting the maximum log weight, so
    huge degeneracies and large gaps stay finite.
    """
    theta = _require_positive_theta(theta)
    logw = _log_weights(spectrum, theta)
    w = np.exp(logw - logw.max())
    probs = w / w.sum()
    probs.setflags(write=False)
    return ThermalState(spectrum=spectrum, theta=theta, level_probs=probs)


def massieu_potential(spectrum: ProbeSpectrum, theta: float) -> float:
    """log Z(theta); nonnegative since the ground state has energy 0."""
    theta = _require_positive_theta(theta)
    logw = _log_weights(spectrum, theta)
    m = logw.max()
    return float(m + math.log(np.exp(logw - m).sum()))


def partition_function(spectrum: ProbeSpectrum, theta: float) -> float:
    """Z = sum_l g_l exp(-e_l / theta).

    Computed as exp(massieu_potential); overflows to inf only when Z itself
    exceeds the double range, in which case log Z remains the usable form.
    """
    try:
        return math.exp(massieu_potential(spectrum, theta))
    except OverflowError:
        return math.inf


def mean_energy(spectrum: ProbeSpectrum, theta: float) -> float:
    """Thermal mean energy at theta."""
    state = thermalize(spectrum, theta)
    return float(np.dot(state.level_probs, spectrum.energies))


def heat_capacity(spectrum: ProbeSpectrum, theta: float) -> float:
    """C(theta) = Var(energy) / theta^2 under the Gibbs weights.

    The variance form is the exact temperature derivative of the mean
    energy; no numerical differentiation is involved.
    """
    theta = _require_positive_theta(theta)
    state = thermalize(spectrum, theta)
    e = float(np.dot(state.level_probs, spectrum.energies))
    var = float(np.dot(state.level_probs, (spectrum.energies - e) ** 2))
    return var / (theta * theta)


def fisher_information(spectrum: ProbeSpectrum, theta: float) -> float:
    """Thermal Fisher information of an energy measurement, C(theta)/theta^2."""
    theta = _require_positive_theta(theta)
    return heat_capacity(spectrum, theta) / (theta * theta)


def _log_int(n: int) -> float:
    # exact-input logarithm for arbitrarily large Python ints
    return math.log(n)


@lru_cache(maxsize=None)
def xi_d(dimension: int) -> float:
    """Root xi > 2 of  exp(xi) = (D - 1) (xi + 2) / (xi - 2).

    Solved in log form (xi + log(xi - 2) - log(xi + 2) = log(D - 1)), which
    is monotone past xi = 2, by bisection with a Newton polish; the log-form
    residual is driven below 1e-13, i.e. a relative residual of the
    exponential form well under 1e-12.  Satisfies xi_D > log(D - 1).
    """
    if dimension < 2:
        raise DomainError(f"dimension must be >= 2, got {dimension}")
    log_dm1 = _log_int(dimension - 1)

    def residual(x: float) -> float:
        return x + math.log(x - 2.0) - math.log(x + 2.0) - log_dm1

    lo = 2.0 + 1e-9
    hi = max(50.0, 2.0 * log_dm1 + 10.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if residual(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12 * hi:
            break
    x = 0.5 * (lo + hi)
    for _ in range(8):
        r = residual(x)
        if abs(r) <= 1e-14:
            break
        slope = 1.0 + 1.0 / (x - 2.0) - 1.0 / (x + 2.0)
        step = r / slope
        nxt = x - step
        if not (lo <= nxt <= hi):
            break
        x = nxt
    return x


def max_heat_capacity_cd(dimension: int) -> float:
    """Dimension-constrained heat-capacity maximum C_D = (xi_D / 2)^2 - 1."""
    x = xi_d(dimension)
    return (0.5 * x) ** 2 - 1.0


def lambert_w(x: float) -> float:
    """Principal branch of the Lambert W function for x >= 0.

    Halley iteration from a log-based initial guess; the residual
    w exp(w) - x is driven below 1e-13 relative.
    """
    x = float(x)
    if x < 0.0:
        raise DomainError(f"lambert_w requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x > 3.0:
        w = math.log(x)
        w -= math.log(w)
    else:
        w = math.log1p(x) * 0.7
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= 1e-14 * max(x, 1e-300):
            break
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        w -= f / denom
    return w


def _lambert_w_from_log(log_x: float) -> float:
    # solve w + log w = log_x by Newton; used when exp(log_x) would overflow
    w = log_x - math.log(log_x)
    for _ in range(50):
        f = w + math.log(w) - log_x
        if abs(f) <= 1e-14:
            break
        w -= f / (1.0 + 1.0 / w)
    return w


def max_energy_per_temperature(dimension: int) -> float:
    """W((D - 1)/e): the thermal-energy ceiling in units of temperature.

    Bounded above by log D, which it approaches from below as D grows.
    """
    if dimension < 2:
        raise DomainError(f"dimension must be >= 2, got {dimension}")
    log_x = _log_int(dimension - 1) - 1.0
    if log_x <= 700.0:
        return lambert_w(math.exp(log_x))
    return _lambert_w_from_log(log_x)


def max_thermal_energy_bound(theta: float, dimension: int) -> float:
    """Upper bound theta * W((D - 1)/e) on the mean energy of any
    D-dimensional probe at temperature theta."""
    theta = _require_positive_theta(theta)
    return theta * max_energy_per_temperature(dimension)


def make_effective_two_level(gap: float, dimension: int) -> ProbeSpectrum:
    """Spectrum {(0, 1), (gap, D - 1)}: unique ground state, maximally
    degenerate excited level."""
    gap = float(gap)
    if not (gap > 0.0):
        raise DomainError(f"gap must be positive, got {gap}")
    if dimension < 2:
        raise DomainError(f"dimension must be >= 2, got {dimension}")
    return ProbeSpectrum(levels=((0.0, 1), (gap, dimension - 1)))
