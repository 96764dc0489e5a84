"""Bayesian equilibrium thermometry with engineered quantum probes.

Grid-based Bayesian temperature estimation with probes thermalized to the
sample: adaptive and non-adaptive measurement protocols, the optimal
logarithmic estimator and its expected error, and the analytic precision
bounds the simulations are benchmarked against.
"""

from .bayes import (
    likelihood,
    likelihood_grid,
    optimal_estimator,
    posterior_msle,
    posterior_update,
    single_shot_emsle,
)
from .bounds import (
    BoundsReport,
    alt_no_go_bound,
    compute_bounds_report,
    gamma_bar,
    no_go_bound,
    ultimate_bound,
)
from .errors import (
    BoundaryConditionWarning,
    ConfigurationError,
    DegenerateUpdateError,
    DomainError,
    GridResolutionWarning,
)
from .harness import (
    ExperimentConfig,
    ExperimentReport,
    OutputSpec,
    emit,
    estimate_emsle,
    load_config,
    run_sweep,
)
from .priors import (
    GridDistribution,
    PriorSpec,
    alt_functional_g,
    bayesian_information_q,
    bessel_i0,
    discretize,
    no_go_functional_f,
    normalization_k_alpha,
    prior_density,
)
from .probe import (
    ProbeSpectrum,
    ThermalState,
    fisher_information,
    heat_capacity,
    lambert_w,
    make_effective_two_level,
    massieu_potential,
    max_energy_per_temperature,
    max_heat_capacity_cd,
    max_thermal_energy_bound,
    mean_energy,
    partition_function,
    thermalize,
    xi_d,
)
from .protocol import (
    Adaptation,
    GapObjective,
    GapSearch,
    ProtocolConfig,
    TrajectoryRecord,
    optimize_gap,
    run_trajectory,
    sample_outcome,
    trajectory_rng,
)

__version__ = "0.1.0"
