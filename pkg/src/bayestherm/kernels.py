"""Backend dispatch for the grid kernels.

Two interchangeable implementations exist: numba-compiled loops
(``_kernels_numba``) and pure numpy (``_kernels_numpy``).  The env var
``BAYESTHERM_BACKEND`` selects one at import time ('numba' by default,
'numpy' to force the fallback); if numba is unavailable the fallback is
used with a warning.  ``set_backend`` switches at runtime, which the test
suite and ``benchmarks/bench_backends.py`` use to compare both paths.
"""

from __future__ import annotations

import importlib
import os
import warnings

_ENV_VAR = "BAYESTHERM_BACKEND"
_BACKENDS = ("numba", "numpy")

_impl = None
_impl_name = ""


def _load(name: str):
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}, expected one of {_BACKENDS}")
    return importlib.import_module(f"._kernels_{name}", __package__)


def set_backend(name: str) -> None:
    """Activate a kernel backend ('numba' or 'numpy')."""
    global _impl, _impl_name
    _impl = _load(name)
    _impl_name = name


def backend_name() -> str:
    """Name of the active backend."""
    return _impl_name


def _init_from_env() -> None:
    requested = os.environ.get(_ENV_VAR, "numba").strip().lower()
    try:
        set_backend(requested)
    except ImportError:
        warnings.warn(
            f"kernel backend {requested!r} unavailable, falling back to numpy",
            RuntimeWarning,
            stacklevel=2,
        )
        set_backend("numpy")


_init_from_env()


def active_window(mass, tail):
    return _impl.active_window(mass, tail)


def single_shot_emsle_two_level(mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot):
    return _impl.single_shot_emsle_two_level(
        mass, inv_theta, log_theta, lo, hi, log_deg, gap, m_tot, s2_tot
    )


def expected_heat_capacity_two_level(mass, inv_theta, lo, hi, log_deg, gap):
    return _impl.expected_heat_capacity_two_level(mass, inv_theta, lo, hi, log_deg, gap)


def optimize_gap_two_level(
    mass, inv_theta, log_theta, lo, hi, log_deg,
    eps_lo, eps_hi, n_scan, rel_tol, objective_id, m_tot, s2_tot,
):
    return _impl.optimize_gap_two_level(
        mass, inv_theta, log_theta, lo, hi, log_deg,
        eps_lo, eps_hi, n_scan, rel_tol, objective_id, m_tot, s2_tot,
    )


def warmup() -> None:
    """Trigger compilation of the active backend on tiny inputs."""
    import numpy as np

    mass = np.full(8, 0.125)
    inv_theta = 1.0 / np.linspace(1.0, 2.0, 8)
    log_theta = np.log(np.linspace(1.0, 2.0, 8))
    lo, hi = active_window(mass, 1e-14)
    m_tot = float(np.dot(mass, log_theta))
    s2_tot = float(np.dot(mass, log_theta**2))
    single_shot_emsle_two_level(mass, inv_theta, log_theta, lo, hi, 0.0, 1.0, m_tot, s2_tot)
    expected_heat_capacity_two_level(mass, inv_theta, lo, hi, 0.0, 1.0)
    optimize_gap_two_level(
        mass, inv_theta, log_theta, lo, hi, 0.0, 0.1, 10.0, 8, 1e-3, 0, m_tot, s2_tot
    )
    optimize_gap_two_level(
        mass, inv_theta, log_theta, lo, hi, 0.0, 0.1, 10.0, 8, 1e-3, 1, m_tot, s2_tot
    )
