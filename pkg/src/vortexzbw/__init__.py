"""Relativistic vortex wave-packet trembling-motion toolkit.

Simulates free Dirac evolution of Bessel-Gaussian electron vortex
packets, extracts the interference-driven trembling observables, and
cross-checks them against closed-form amplitude laws.
"""

__version__ = "0.1.0"

from .analytic import (
    ClosedFormValue,
    ConsistencyReport,
    ConsistencyRow,
    I_closed_form,
    bessel_limit,
    enhancement_factor,
    gamma_ratio_enhancement,
    gaussian_limit,
    huang_amplitude,
    large_ell_asymptotic,
    log_I_closed_form,
    run_consistency_report,
)
from .config import RunConfig, load_config, parse_config
from .dirac import (
    ELECTRON_SI,
    NATURAL_UNITS,
    MomentumVec,
    UnitSystem,
    dirac_hamiltonian,
    energy,
    gamma_factor,
    project_energy_sectors,
    spinor_u,
    spinor_v,
)
from .errors import (
    ConfigError,
    DomainError,
    GridConvergenceError,
    NumericalFailure,
    RegimeError,
    RegimeWarning,
    UnderresolvedSeriesError,
)
from .observables import (
    ObservableSeries,
    SweepRow,
    ZBWFit,
    angular_momentum_zbw,
    dephasing_time,
    drift_velocity,
    fit_zbw,
    interference_displacement_series,
    mean_transverse_momentum,
    position_series,
    sweep_enhancement,
    time_grid,
    velocity_series,
)
from .packet import NR_MOMENTUM_BOUND, BGParams
from .quadrature import QuadratureGrid, build_grid, integrate
from .realspace import (
    BispinorField,
    CylGrid,
    GordonTerms,
    angular_series,
    build_cyl_grid,
    density_profile,
    gordon_residual,
    prepare_reconstruction,
    reconstruct,
)
from .state import DiracPacketState, decompose, negative_energy_fraction

__all__ = [
    "__version__",
    "BGParams",
    "NR_MOMENTUM_BOUND",
    "RunConfig",
    "load_config",
    "parse_config",
    "UnitSystem",
    "NATURAL_UNITS",
    "ELECTRON_SI",
    "MomentumVec",
    "energy",
    "gamma_factor",
    "spinor_u",
    "spinor_v",
    "dirac_hamiltonian",
    "project_energy_sectors",
    "QuadratureGrid",
    "build_grid",
    "integrate",
    "DiracPacketState",
    "decompose",
    "negative_energy_fraction",
    "ObservableSeries",
    "ZBWFit",
    "SweepRow",
    "time_grid",
    "velocity_series",
    "position_series",
    "interference_displacement_series",
    "drift_velocity",
    "mean_transverse_momentum",
    "fit_zbw",
    "dephasing_time",
    "sweep_enhancement",
    "angular_momentum_zbw",
    "ClosedFormValue",
    "I_closed_form",
    "log_I_closed_form",
    "gaussian_limit",
    "large_ell_asymptotic",
    "bessel_limit",
    "huang_amplitude",
    "enhancement_factor",
    "gamma_ratio_enhancement",
    "run_consistency_report",
    "ConsistencyRow",
    "ConsistencyReport",
    "CylGrid",
    "BispinorField",
    "GordonTerms",
    "build_cyl_grid",
    "prepare_reconstruction",
    "reconstruct",
    "density_profile",
    "angular_series",
    "gordon_residual",
    "ConfigError",
    "NumericalFailure",
    "GridConvergenceError",
    "DomainError",
    "UnderresolvedSeriesError",
    "RegimeError",
    "RegimeWarning",
]
