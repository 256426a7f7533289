"""Measurement-conditioned dynamics of charge- and dipole-conserving circuits.

The package wraps the C++ core: exact and particle-filter evolution of the
measurement-conditioned classical state, sector connectivity tables, decay-
form fitting, and numerical evaluation of the coarse-grained field theory.
"""

from ._core import (
    ConfigError,
    EngineOverflow,
    LatticeGeometry,
    QuadratureError,
    TheoryParams,
    __version__,
    charge,
    compare_report,
    density_correlator,
    dipole,
    exponent_table,
    fit_scaling,
    gamma_critical,
    global_sectors,
    ln_renyi2,
    luttinger_K,
    rho_bar,
    rho_s,
    run_simulation,
    trajectory_series,
    window_components,
)

__all__ = [
    "ConfigError",
    "EngineOverflow",
    "LatticeGeometry",
    "QuadratureError",
    "TheoryParams",
    "__version__",
    "charge",
    "compare_report",
    "density_correlator",
    "dipole",
    "exponent_table",
    "fit_scaling",
    "gamma_critical",
    "global_sectors",
    "ln_renyi2",
    "luttinger_K",
    "rho_bar",
    "rho_s",
    "run_simulation",
    "trajectory_series",
    "window_components",
]
