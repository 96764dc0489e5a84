"""Prior family over temperature and its information functionals.

The prior family has a sharpness parameter alpha on a bounded support
[theta_min, theta_max]:

    p(theta) = [exp(alpha * sin^2(pi * (theta - theta_min) / width)) - 1]
               / (k_alpha * width),          width = theta_max - theta_min

with the normalization constant

    k_alpha = exp(alpha / 2) * I0(alpha / 2) - 1

(I0 is the modified Bessel function of the first kind, order zero).
alpha > 0 concentrates mass at the center of the support, alpha -> 0
degenerates to a sin^2 window, and alpha -> -inf flattens to the uniform
density.  ``alpha = -inf`` is accepted and selects the exact uniform limit.

Densities are discretized on a log-uniform temperature grid with
trapezoidal quadrature in log theta, which keeps the logarithmic-error
integrals used elsewhere uniform-weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "PriorSpec",
    "GridDistribution",
    "bessel_i0",
    "normalization_k_alpha",
    "prior_density",
    "discretize",
    "bayesian_information_q",
    "no_go_functional_f",
    "alt_functional_g",
]

# below this sharpness the density switches to its analytic sin^2 limit
ALPHA_SIN2_LIMIT = 1e-6
# below this the k_alpha power series avoids cancellation in exp*I0 - 1
_ALPHA_SERIES_LIMIT = 1e-4

NORMALIZATION_ATOL = 1e-10

_MIN_GRID_SIZE = 16


def bessel_i0(x: float) -> float:
    """Modified Bessel function of the first kind, order zero.

    Power series for small arguments, asymptotic expansion beyond the
    crossover.  Relative error is at machine level (<= 1e-13) on both
    branches; the function is even, so negative inputs are folded.
    """
    x = abs(float(x))
    if x < 18.0:
        return _i0_series(x)
    return math.exp(x) * _i0e_asymptotic(x)


def _i0_series(x: float) -> float:
    # sum_k (x^2/4)^k / (k!)^2; all terms positive, no cancellation
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while term > 1e-18 * total:
        k += 1
        term *= q / (k * k)
        total += term
    return total


def _i0e_asymptotic(x: float) -> float:
    # exp(-x) * I0(x) ~ (2 pi x)^(-1/2) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    # truncated at its smallest term; for x >= 18 that term is < 1e-14
    total = 1.0
    term = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt >= term or nxt < 1e-17 * total:
            break
        term = nxt
        total += term
    return total / math.sqrt(2.0 * math.pi * x)


def _i0e(x: float) -> float:
    """exp(-x) * I0(x) for x >= 0, stable for large x."""
    if x < 18.0:
        return math.exp(-x) * _i0_series(x)
    return _i0e_asymptotic(x)


def normalization_k_alpha(alpha: float) -> float:
    """Normalization constant k_alpha = exp(alpha/2) * I0(alpha/2) - 1.

    A power series takes over for |alpha| below 1e-4, where the direct
    subtraction would cancel.  k_0 = 0; k_alpha -> -1 as alpha -> -inf.
    """
    alpha = float(alpha)
    if alpha == -math.inf:
        return -1.0
    if not math.isfinite(alpha):
        raise ConfigurationError(f"alpha must be finite or -inf, got {alpha}")
    if abs(alpha) <= _ALPHA_SERIES_LIMIT:
        z = 0.5 * alpha
        return z * (1.0 + z * (0.75 + z * (5.0 / 12.0)))
    # exp(z) I0(z) = exp(z + |z|) * [exp(-|z|) I0(|z|)], exact for either sign
    z = 0.5 * alpha
    scaled = _i0e(abs(z))
    if z > 0:
        return math.exp(2.0 * z) * scaled - 1.0
    return scaled - 1.0


@dataclass(frozen=True)
class PriorSpec:
    """Parameters of the prior family: sharpness and support."""

    alpha: float
    theta_min: float
    theta_max: float

    def __post_init__(self) -> None:
        if not (self.theta_min > 0.0):
            raise ConfigurationError(f"theta_min must be positive, got {self.theta_min}")
        if not (self.theta_max > self.theta_min):
            raise ConfigurationError(
                f"theta_max must exceed theta_min, got [{self.theta_min}, {self.theta_max}]"
            )
        if math.isnan(self.alpha) or self.alpha == math.inf:
            raise ConfigurationError(f"alpha must be finite or -inf, got {self.alpha}")

    @classmethod
    def uniform(cls, theta_min: float, theta_max: float) -> "PriorSpec":
        """The exact uniform limit of the family (alpha -> -inf)."""
        return cls(alpha=-math.inf, theta_min=theta_min, theta_max=theta_max)

    @property
    def width(self) -> float:
        return self.theta_max - self.theta_min


def prior_density(spec: PriorSpec, theta):
    """Evaluate the prior density at ``theta`` (scalar or array).

    Returns 0 outside [theta_min, theta_max].  The sin^2 argument is
    computed from the distance to the nearest support boundary, so the
    density vanishes exactly at both ends and p(theta_min + x) equals
    p(theta_max - x) bit-for-bit.
    """
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)
    width = spec.width
    # distance to nearest boundary in units of the width, exact 0 at the ends
    u = np.minimum(th - spec.theta_min, spec.theta_max - th) / width
    inside = u >= 0.0
    u = np.where(inside, u, 0.0)
    if spec.alpha == -math.inf:
        vals = np.full_like(th, 1.0 / width)
    elif abs(spec.alpha) < ALPHA_SIN2_LIMIT:
        # analytic alpha -> 0 limit: p = 2 sin^2(pi u) / width
        vals = 2.0 * np.sin(np.pi * u) ** 2 / width
    else:
        k = normalization_k_alpha(spec.alpha)
        vals = np.expm1(spec.alpha * np.sin(np.pi * u) ** 2) / (k * width)
    vals = np.where(inside, vals, 0.0)
    return float(vals[0]) if scalar else vals


def _log_trapezoid_quadrature(grid: np.ndarray) -> np.ndarray:
    """Node weights of the trapezoidal rule in log theta.

    For a strictly increasing grid, integrating f(theta) d theta equals
    integrating f * theta d(log theta); the returned weights already carry
    the theta Jacobian, so sum(w * f(grid)) approximates the theta integral.
    """
    lam = np.log(grid)
    dlam = np.diff(lam)
    w = np.empty_like(grid)
    w[0] = 0.5 * dlam[0]
    w[-1] = 0.5 * dlam[-1]
    w[1:-1] = 0.5 * (dlam[:-1] + dlam[1:])
    return w * grid


@dataclass(frozen=True)
class GridDistribution:
    """A normalized density over temperature on a fixed grid.

    ``grid`` holds the temperature nodes (strictly increasing), ``weights``
    the density values at the nodes, and ``quadrature`` the node weights of
    the integration rule, so that sum(quadrature * weights) == 1.
    Instances are immutable; updates construct new values.
    """

    grid: np.ndarray
    weights: np.ndarray
    quadrature: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        quadrature = np.asarray(self.quadrature, dtype=float)
        if not (grid.ndim == 1 and grid.shape == weights.shape == quadrature.shape):
            raise ValueError("grid, weights and quadrature must be 1-d of equal length")
        if grid.size < _MIN_GRID_SIZE:
            raise ValueError(f"grid must have at least {_MIN_GRID_SIZE} nodes, got {grid.size}")
        if not np.all(np.diff(grid) > 0.0):
            raise ValueError("grid must be strictly increasing")
        if not (grid[0] > 0.0):
            raise ValueError("grid temperatures must be positive")
        if np.any(weights < 0.0):
            raise ValueError("density values must be nonnegative")
        total = float(np.dot(quadrature, weights))
        if abs(total - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(f"distribution not normalized: sum w*p = {total!r}")
        for name, arr in (("grid", grid), ("weights", weights), ("quadrature", quadrature)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        log_grid = np.log(self.grid)
        log_grid.setflags(write=False)
        mass = self.quadrature * self.weights
        mass.setflags(write=False)
        inv_grid = 1.0 / self.grid
        inv_grid.setflags(write=False)
        object.__setattr__(self, "_log_grid", log_grid)
        object.__setattr__(self, "_mass", mass)
        object.__setattr__(self, "_inv_grid", inv_grid)

    def with_weights(self, weights: np.ndarray) -> "GridDistribution":
        """New distribution on the same grid, sharing the cached grid arrays.

        The weights must already be normalized under this distribution's
        quadrature; nonnegativity and normalization are still enforced.
        """
        w = np.asarray(weights, dtype=float)
        if w.shape != self.grid.shape:
            raise ValueError("weights shape does not match the grid")
        total = float(np.dot(self.quadrature, w))
        if abs(total - 1.0) > NORMALIZATION_ATOL:
            raise ValueError(f"distribution not normalized: sum w*p = {total!r}")
        if np.any(w < 0.0):
            raise ValueError("density values must be nonnegative")
        w = w.copy()
        w.setflags(write=False)
        mass = self.quadrature * w
        mass.setflags(write=False)
        obj = object.__new__(GridDistribution)
        object.__setattr__(obj, "grid", self.grid)
        object.__setattr__(obj, "weights", w)
        object.__setattr__(obj, "quadrature", self.quadrature)
        object.__setattr__(obj, "_log_grid", self._log_grid)
        object.__setattr__(obj, "_inv_grid", self._inv_grid)
        object.__setattr__(obj, "_mass", mass)
        return obj

    @classmethod
    def from_density(
        cls,
        grid: np.ndarray,
        density: np.ndarray,
        quadrature: np.ndarray | None = None,
    ) -> "GridDistribution":
        """Build a distribution, renormalizing the density under the rule."""
        grid = np.asarray(grid, dtype=float)
        density = np.asarray(density, dtype=float)
        if quadrature is None:
            quadrature = _log_trapezoid_quadrature(grid)
        total = float(np.dot(quadrature, density))
        if not (total > 0.0) or not math.isfinite(total):
            raise ValueError(f"density does not integrate to a positive value: {total!r}")
        return cls(grid=grid, weights=density / total, quadrature=quadrature)

    @property
    def size(self) -> int:
        return int(self.grid.size)

    @property
    def log_grid(self) -> np.ndarray:
        """log of the temperature nodes."""
        return self._log_grid

    @property
    def mass(self) -> np.ndarray:
        """Per-node probability mass, quadrature * weights (sums to 1)."""
        return self._mass

    @property
    def inv_grid(self) -> np.ndarray:
        """1 / grid, cached for the measurement-model kernels."""
        return self._inv_grid

    def expectation(self, values: np.ndarray) -> float:
        """Quadrature expectation of per-node values under the density."""
        return float(np.dot(self._mass, values))


def discretize(spec: PriorSpec, grid_size: int = 2048) -> GridDistribution:
    """Discretize the prior on a log-uniform grid over its support."""
    if grid_size < _MIN_GRID_SIZE:
        raise ConfigurationError(f"grid_size must be >= {_MIN_GRID_SIZE}, got {grid_size}")
    lam = np.linspace(math.log(spec.theta_min), math.log(spec.theta_max), grid_size)
    grid = np.exp(lam)
    # pin the endpoints so the density vanishes exactly at the boundary nodes
    grid[0] = spec.theta_min
    grid[-1] = spec.theta_max
    density = prior_density(spec, grid)
    return GridDistribution.from_density(grid, density)


def _density_gradient(dist: GridDistribution) -> np.ndarray:
    # second-order central differences on interior nodes, one-sided at ends
    return np.gradient(dist.weights, dist.grid, edge_order=2)


def bayesian_information_q(dist: GridDistribution) -> float:
    """Prior information Q[p] = integral of p * (1 + theta * dlog p)^2.

    The integrand is defined as 0 at nodes where the density vanishes (its
    0/0 there is removable).  Where the density vanishes at a support
    boundary the integrand has a finite limit, so the boundary cell is
    integrated by constant extension of the adjacent interior value; plain
    trapezoid with a zeroed endpoint would converge only first order.
    """
    p = dist.weights
    dp = _density_gradient(dist)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p > 0.0, dp / np.where(p > 0.0, p, 1.0), 0.0)
    integrand = np.where(p > 0.0, p * (1.0 + dist.grid * ratio) ** 2, 0.0)
    q = float(np.dot(dist.quadrature, integrand))
    if p[0] == 0.0:
        q += 0.5 * (dist.grid[1] - dist.grid[0]) * integrand[1]
    if p[-1] == 0.0:
        q += 0.5 * (dist.grid[-1] - dist.grid[-2]) * integrand[-2]
    return q


def no_go_functional_f(dist: GridDistribution) -> float:
    """f[p] = integral of -dp/dtheta * theta over the region where the
    density is non-increasing."""
    dp = _density_gradient(dist)
    integrand = np.where(dp <= 0.0, -dp * dist.grid, 0.0)
    return float(np.dot(dist.quadrature, integrand))


def alt_functional_g(dist: GridDistribution) -> float:
    """g[p] = integral of d/dtheta (theta^2 dp/dtheta) over the region where
    that derivative is nonnegative."""
    dp = _density_gradient(dist)
    flux = dist.grid**2 * dp
    v = np.gradient(flux, dist.grid, edge_order=2)
    integrand = np.where(v >= 0.0, v, 0.0)
    return float(np.dot(dist.quadrature, integrand))
