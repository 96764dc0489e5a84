"""Adaptive and non-adaptive measurement protocols.

Each round engineers an effective two-level probe of dimension d^n (one
ground state, a (d^n - 1)-fold degenerate excited level), picks its gap by
optimizing an objective over the current distribution, samples an outcome
at the true temperature, and propagates the posterior.  Adaptive runs
re-optimize every round on the running posterior; non-adaptive runs fix
the gap once from the initial prior.

The gap search scans a log-spaced bracket and refines with golden-section
steps; the default objective is the expected posterior log-error after a
single shot, with the posterior-averaged heat capacity available for
comparison runs.

Randomness comes from counter-based streams: trajectory i of a run seeded
with s uses Philox keyed by (s, i), so trajectories are reproducible and
independent of scheduling order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from . import kernels
from .bayes import likelihood_grid, optimal_estimator, posterior_msle, posterior_update
from .errors import ConfigurationError, DegenerateUpdateError, GridResolutionWarning
from .priors import GridDistribution
from .probe import ProbeSpectrum, make_effective_two_level, thermalize, xi_d

__all__ = [
    "Adaptation",
    "GapObjective",
    "GapSearch",
    "ProtocolConfig",
    "RoundRecord",
    "TrajectoryRecord",
    "trajectory_rng",
    "optimize_gap",
    "sample_outcome",
    "run_trajectory",
]

# warn when a posterior standard deviation spans fewer grid nodes than this
MIN_NODES_PER_SIGMA = 10.0


class Adaptation(str, Enum):
    ADAPTIVE = "adaptive"
    NON_ADAPTIVE = "non_adaptive"


class GapObjective(str, Enum):
    SINGLE_SHOT_EMSLE = "single_shot_emsle"
    EXPECTED_HEAT_CAPACITY = "expected_heat_capacity"


_OBJECTIVE_IDS = {GapObjective.SINGLE_SHOT_EMSLE: 0, GapObjective.EXPECTED_HEAT_CAPACITY: 1}


@dataclass(frozen=True)
class GapSearch:
    """Bracket and tolerance of the per-round gap optimization.

    The bracket is [lo_factor * grid_min, hi_factor * xi_D * grid_max]: the
    optimum for any distribution supported on the grid lies near xi_D times
    a temperature in the support.  ``tail_mass`` is the per-side posterior
    mass excluded from objective quadrature (pure evaluation cutoff).
    """

    lo_factor: float = 0.1
    hi_factor: float = 2.0
    scan_points: int = 64
    rel_tol: float = 1e-4
    tail_mass: float = 1e-14

    def __post_init__(self) -> None:
        if not (0 < self.lo_factor and self.hi_factor > 0):
            raise ConfigurationError("gap-search bracket factors must be positive")
        if self.scan_points < 4:
            raise ConfigurationError("gap search needs at least 4 scan points")
        if not (0 < self.rel_tol < 1):
            raise ConfigurationError("gap-search rel_tol must lie in (0, 1)")


@dataclass(frozen=True)
class ProtocolConfig:
    """One protocol setting: n probes per round, m rounds, qudit dimension d."""

    n: int = 1
    m: int = 1
    d: int = 2
    adaptation: Adaptation = Adaptation.ADAPTIVE
    objective: GapObjective = GapObjective.SINGLE_SHOT_EMSLE
    gap_search: GapSearch = field(default_factory=GapSearch)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"n must be >= 1, got {self.n}")
        if self.m < 0:
            raise ConfigurationError(f"m must be >= 0, got {self.m}")
        if self.d < 2:
            raise ConfigurationError(f"d must be >= 2, got {self.d}")
        object.__setattr__(self, "adaptation", Adaptation(self.adaptation))
        object.__setattr__(self, "objective", GapObjective(self.objective))

    @property
    def dimension(self) -> int:
        """Effective probe dimension d^n (exact integer arithmetic)."""
        return self.d**self.n

    @property
    def total_probes(self) -> int:
        return self.n * self.m


@dataclass(frozen=True)
class RoundRecord:
    gap: float
    outcome: int
    evidence: float
    estimator: float
    posterior_msle: float


@dataclass(frozen=True)
class TrajectoryRecord:
    """One simulated trajectory.

    Per-round data is held in parallel arrays (index k is round k+1); the
    ``rounds`` property exposes them as records.  ``aborted`` flags a
    degenerate-evidence stop, in which case fewer than m rounds exist.
    """

    theta_true: float
    gaps: np.ndarray
    outcomes: np.ndarray
    evidences: np.ndarray
    estimators: np.ndarray
    posterior_msles: np.ndarray
    final_estimator: float
    final_log_error: float
    aborted: bool = False

    @property
    def num_rounds(self) -> int:
        return int(self.gaps.size)

    @property
    def rounds(self) -> list[RoundRecord]:
        return [
            RoundRecord(
                gap=float(self.gaps[k]),
                outcome=int(self.outcomes[k]),
                evidence=float(self.evidences[k]),
                estimator=float(self.estimators[k]),
                posterior_msle=float(self.posterior_msles[k]),
            )
            for k in range(self.num_rounds)
        ]


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one trajectory, keyed by (seed, index)."""
    key = np.array([master_seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@lru_cache(maxsize=None)
def _log_excited_degeneracy(dimension: int) -> float:
    return math.log(dimension - 1)


def optimize_gap(dist: GridDistribution, config: ProtocolConfig) -> float:
    """Gap of the effective two-level probe optimizing the configured
    objective for the current distribution."""
    gs = config.gap_search
    dim = config.dimension
    xi = xi_d(dim)
    eps_lo = gs.lo_factor * float(dist.grid[0])
    eps_hi = gs.hi_factor * xi * float(dist.grid[-1])
    mass = dist.mass
    lo, hi = kernels.active_window(mass, gs.tail_mass)
    m_tot = float(np.dot(mass, dist.log_grid))
    s2_tot = float(np.dot(mass, dist.log_grid**2))
    return float(
        kernels.optimize_gap_two_level(
            mass,
            dist.inv_grid,
            dist.log_grid,
            lo,
            hi,
            _log_excited_degeneracy(dim),
            eps_lo,
            eps_hi,
            gs.scan_points,
            gs.rel_tol,
            _OBJECTIVE_IDS[config.objective],
            m_tot,
            s2_tot,
        )
    )


def sample_outcome(
    spectrum: ProbeSpectrum, theta_true: float, rng: np.random.Generator
) -> int:
    """Draw a level index from the thermal occupation at the true temperature."""
    probs = thermalize(spectrum, theta_true).level_probs
    cdf = np.cumsum(probs)
    x = int(np.searchsorted(cdf, rng.random(), side="right"))
    return min(x, probs.size - 1)


def run_trajectory(
    prior: GridDistribution,
    theta_true: float,
    config: ProtocolConfig,
    rng: np.random.Generator,
) -> TrajectoryRecord:
    """Simulate one measurement trajectory at ``theta_true``.

    Adaptive runs re-optimize the gap on the current posterior every round;
    non-adaptive runs keep the gap chosen from the initial prior.  A
    degenerate update aborts the trajectory with a partial record.
    """
    theta_true = float(theta_true)
    if not (prior.grid[0] <= theta_true <= prior.grid[-1]):
        raise ConfigurationError(
            f"theta_true {theta_true} outside the prior support "
            f"[{prior.grid[0]}, {prior.grid[-1]}]"
        )
    m = config.m
    gaps = np.empty(m)
    outcomes = np.empty(m, dtype=np.int64)
    evidences = np.empty(m)
    estimators = np.empty(m)
    msles = np.empty(m)

    dim = config.dimension
    adaptive = config.adaptation is Adaptation.ADAPTIVE
    dist = prior
    fixed_gap = None
    fixed_spectrum = None
    fixed_lik = None
    if not adaptive and m > 0:
        fixed_gap = optimize_gap(prior, config)
        fixed_spectrum = make_effective_two_level(fixed_gap, dim)
        fixed_lik = likelihood_grid(fixed_spectrum, prior.grid)

    dlam_min = float(np.min(np.diff(prior.log_grid)))
    warned_resolution = False
    aborted = False
    rounds_done = 0
    for _ in range(m):
        if adaptive:
            gap = optimize_gap(dist, config)
            spectrum = make_effective_two_level(gap, dim)
            lik = None
        else:
            gap = fixed_gap
            spectrum = fixed_spectrum
            lik = fixed_lik
        outcome = sample_outcome(spectrum, theta_true, rng)
        try:
            dist, evidence = posterior_update(dist, spectrum, outcome, likelihoods=lik)
        except DegenerateUpdateError:
            aborted = True
            break
        est = optimal_estimator(dist)
        msle = posterior_msle(dist)
        k = rounds_done
        gaps[k] = gap
        outcomes[k] = outcome
        evidences[k] = evidence
        estimators[k] = est
        msles[k] = msle
        rounds_done += 1
        if not warned_resolution and math.sqrt(msle) < MIN_NODES_PER_SIGMA * dlam_min:
            warnings.warn(
                f"posterior standard deviation spans fewer than "
                f"{MIN_NODES_PER_SIGMA:.0f} grid nodes after round {rounds_done}",
                GridResolutionWarning,
                stacklevel=2,
            )
            warned_resolution = True

    final_est = estimators[rounds_done - 1] if rounds_done else optimal_estimator(prior)
    final_log_error = math.log(final_est / theta_true) ** 2
    for arr in (gaps, outcomes, evidences, estimators, msles):
        arr.setflags(write=False)
    return TrajectoryRecord(
        theta_true=theta_true,
        gaps=gaps[:rounds_done],
        outcomes=outcomes[:rounds_done],
        evidences=evidences[:rounds_done],
        estimators=estimators[:rounds_done],
        posterior_msles=msles[:rounds_done],
        final_estimator=float(final_est),
        final_log_error=float(final_log_error),
        aborted=aborted,
    )
