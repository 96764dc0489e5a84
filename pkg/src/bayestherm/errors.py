"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid experiment or prior configuration."""


class DomainError(ValueError):
    """An argument lies outside the physical domain (e.g. theta <= 0)."""


class DegenerateUpdateError(RuntimeError):
    """Posterior update whose evidence underflowed; the observed outcome is
    essentially impossible under the current distribution."""


class BoundaryConditionWarning(UserWarning):
    """A bound was evaluated for a prior that does not vanish at the support
    boundaries, violating an assumption of its derivation."""


class GridResolutionWarning(UserWarning):
    """The posterior has become too sharp for the fixed grid (fewer than the
    required number of nodes per posterior standard deviation)."""
