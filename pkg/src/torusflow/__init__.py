"""Pseudo-spectral solver for the 2D incompressible Navier-Stokes and Euler
equations on the periodic square, with a semi-implicit iterative time
stepper and the verification harness around it."""

from .spectral import (
    Advection,
    PhysicalField,
    PhysicalGrid,
    SpectralScalarField,
    SpectralVectorField,
    convective_term,
    curl,
    divergence,
    forward_transform,
    fractional_lambda,
    inner_product,
    inverse_transform,
    l2_norm,
    leray_project,
    sobolev_norm,
    spectral_derivative,
    truncate,
)
from .stepping import (
    DiagnosticsRecord,
    NonFiniteStateError,
    PicardDivergenceError,
    RunResult,
    Scheme,
    SolverError,
    StepFailedError,
    StepResult,
    StepperConfig,
    explicit_step,
    implicit_viscous_solve,
    picard_step,
    run,
    step,
)
from .scenarios import (
    Scenario,
    double_shear_vorticity,
    gaussian_vortices_vorticity,
    get_scenario,
    manufactured_forcing,
    manufactured_velocity,
    taylor_green_family,
    velocity_from_vorticity,
)
from .diagnostics import (
    SweepResult,
    SweepSpec,
    convergence_sweep,
    energy_violations,
    error_norms,
    observed_orders,
    vorticity_snapshot,
)

__version__ = "0.1.0"
