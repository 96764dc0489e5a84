"""Bayesian estimation core: likelihoods, posterior updates, the optimal
log-mean estimator and its error measures.

Outcomes are energy-measurement results coarse-grained to the level index
(all degenerate eigenstates of a level share one likelihood, so the level
index is statistically sufficient).  The estimator minimizing the expected
squared logarithmic error is the exponential of the posterior mean of
log theta, and the matching posterior error is the posterior variance of
log theta.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DegenerateUpdateError, DomainError
from .priors import GridDistribution
from .probe import ProbeSpectrum, thermalize

__all__ = [
    "Outcome",
    "likelihood",
    "likelihood_grid",
    "posterior_update",
    "optimal_estimator",
    "posterior_msle",
    "single_shot_emsle",
]

# energy-measurement outcome, coarse-grained to the spectrum's level index
Outcome = int

EVIDENCE_FLOOR = 1e-300


def _check_outcome(spectrum: ProbeSpectrum, outcome: int) -> int:
    outcome = int(outcome)
    if not (0 <= outcome < spectrum.num_levels):
        raise DomainError(
            f"outcome {outcome} out of range for a {spectrum.num_levels}-level spectrum"
        )
    return outcome


def likelihood(spectrum: ProbeSpectrum, theta: float, outcome: Outcome) -> float:
    """Probability of observing ``outcome`` on a probe thermalized at theta."""
    outcome = _check_outcome(spectrum, outcome)
    return float(thermalize(spectrum, theta).level_probs[outcome])


def likelihood_grid(spectrum: ProbeSpectrum, grid: np.ndarray) -> np.ndarray:
    """Outcome likelihoods at every grid temperature.

    Returns an array of shape (num_levels, len(grid)); each column is the
    thermal occupation distribution at that temperature, computed by a
    shifted softmax so huge degeneracies stay finite.  Two-level spectra
    reduce to a single logistic pass.
    """
    inv = 1.0 / grid
    if spectrum.num_levels == 2:
        ld = spectrum.log_degeneracies
        t = (ld[1] - ld[0]) - (spectrum.energies[1] - spectrum.energies[0]) * inv
        excited = np.empty_like(t)
        pos = t >= 0.0
        excited[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
        z = np.exp(t[~pos])
        excited[~pos] = z / (1.0 + z)
        return np.stack([1.0 - excited, excited])
    logw = spectrum.log_degeneracies[:, None] - np.outer(spectrum.energies, inv)
    logw -= logw.max(axis=0, keepdims=True)
    w = np.exp(logw)
    return w / w.sum(axis=0, keepdims=True)


def posterior_update(
    dist: GridDistribution,
    spectrum: ProbeSpectrum,
    outcome: Outcome,
    *,
    likelihoods: np.ndarray | None = None,
) -> tuple[GridDistribution, float]:
    """Condition ``dist`` on one measurement outcome.

    Returns the posterior and the evidence (the quadrature marginal of the
    outcome under ``dist``).  ``likelihoods`` may pass a precomputed
    ``likelihood_grid`` result when the same spectrum is reused.  An
    evidence below 1e-300 aborts the update rather than renormalizing
    noise into a posterior.
    """
    outcome = _check_outcome(spectrum, outcome)
    if likelihoods is None:
        likelihoods = likelihood_grid(spectrum, dist.grid)
    lik = likelihoods[outcome]
    evidence = float(np.dot(dist.mass, lik))
    if not (evidence > EVIDENCE_FLOOR):
        raise DegenerateUpdateError(
            f"evidence {evidence!r} for outcome {outcome}; the observed outcome is "
            "essentially impossible under the current distribution"
        )
    posterior = dist.with_weights(dist.weights * lik / evidence)
    return posterior, evidence


def optimal_estimator(dist: GridDistribution) -> float:
    """exp of the posterior mean of log theta; lies inside the support."""
    return math.exp(float(np.dot(dist.mass, dist.log_grid)))


def posterior_msle(dist: GridDistribution) -> float:
    """Posterior mean square logarithmic error about the optimal estimator,
    i.e. the posterior variance of log theta."""
    mean_log = float(np.dot(dist.mass, dist.log_grid))
    return float(np.dot(dist.mass, (dist.log_grid - mean_log) ** 2))


def single_shot_emsle(dist: GridDistribution, spectrum: ProbeSpectrum) -> float:
    """Expected posterior MSLE after one measurement on ``spectrum``.

    Sum over outcomes of evidence(x) * posterior_msle(posterior_x).  Never
    exceeds posterior_msle(dist): measuring cannot hurt on average.
    """
    lik = likelihood_grid(spectrum, dist.grid)
    mass = dist.mass
    log_grid = dist.log_grid
    s2_tot = float(np.dot(mass, log_grid**2))
    total = s2_tot
    for x in range(spectrum.num_levels):
        mw = mass * lik[x]
        evidence = float(mw.sum())
        if evidence <= 0.0:
            continue
        m1 = float(np.dot(mw, log_grid))
        total -= m1 * m1 / evidence
    return total
