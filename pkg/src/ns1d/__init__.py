"""Vacuum-tolerant 1D isentropic compressible Navier-Stokes simulator.

The solver integrates the mass and momentum equations with pressure
rho**gamma and density-dependent viscosity 1 + rho**beta on a staggered
grid, tolerating genuine vacuum regions.  Alongside the time stepping it
evaluates, at runtime, the family of estimate functionals that the
continuum theory proves bounded: energy and dissipation ledgers,
derivative norms, spatially weighted moments, material-derivative norms
and their time-weighted variants, plus a Lagrangian transported-potential
monitor that turns the uniform density bound into an executable check.
A separate harness verifies the weighted interpolation inequalities the
estimates rely on.
"""

from .core import (
    ALPHA_UPPER,
    AlphaReport,
    ConfigError,
    Grid,
    Params,
    State,
    alpha_check,
    eta,
    eta_inverse,
    face_density,
    make_grid,
    pressure,
    viscosity,
)
from .solver import (
    CompatibilityReport,
    InitialProfile,
    IntegrationError,
    RunResult,
    RunSinks,
    build_initial_data,
    cfl_dt,
    run,
    step,
)
from .trajectories import (
    BoundReport,
    ParticleSet,
    advect_particles,
    density_bound_monitor,
    momentum_potential_residual,
    seed_particles,
    xi_field,
)
from .diagnostics import (
    DIAG_FIELDS,
    DiagRecord,
    effective_viscous_flux,
    first_order_group,
    full_record,
    gradient,
    higher_order_group,
    material_derivative,
    time_derivative,
    transport_residuals,
    uinf_interpolation_check,
    weighted_group,
)
from .inequalities import (
    CknCase,
    HardyProbeReport,
    TestFunction,
    balance_check,
    ckn_ratio,
    gaussian,
    hardy_best_constant_probe,
    power_profile,
    random_fourier,
    weighted_norm,
)
from .config import RunConfig, SweepConfig, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
