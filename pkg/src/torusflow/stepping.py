"""Time integration of the truncated incompressible equations.

The production scheme treats viscosity and the transported velocity
implicitly and solves the resulting linear step by fixed-point (Picard)
iteration; an explicit-transport variant with the same linear part is kept
for comparison runs.  States stay divergence free and band limited by
construction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .spectral import (
    Advection,
    PhysicalGrid,
    SpectralScalarField,
    SpectralVectorField,
    Field,
    l2_norm,
    leray_project,
    sobolev_norm,
    truncate,
)

ForcingFunction = Callable[[float], SpectralVectorField]


class Scheme(enum.Enum):
    """Available time discretizations."""

    #: transported velocity taken at the new time level, solved iteratively
    SEMI_IMPLICIT_ITERATIVE = "semi-implicit"
    #: transport fully explicit, viscosity still implicit
    EXPLICIT_TRANSPORT = "explicit"


class SolverError(RuntimeError):
    """Base class for time-stepping failures."""


class PicardDivergenceError(SolverError):
    """Fixed-point iteration failed to meet tolerance within the budget.

    Usually means the time step violates the contraction condition
    tau <= C * max(nu, 1/N).
    """

    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no contraction after {iterations} iterations, last increment {residual:.3e}"
        )


class NonFiniteStateError(SolverError):
    """The iteration or step produced NaN or Inf coefficients."""


class StepFailedError(SolverError):
    """Wraps a solver failure with the index of the offending step."""

    def __init__(self, step: int, time: float, cause: SolverError):
        self.step = step
        self.time = time
        super().__init__(f"step {step} (t = {time:.6g}) failed: {cause}")


@dataclass(frozen=True)
class StepperConfig:
    """Parameters of one time integration.

    forcing, when present, is sampled at the left endpoint of each step and
    is Leray-projected and truncated before use.
    """

    tau: float
    nu: float
    truncation: int | None = None
    tolerance: float = 1e-10
    max_iterations: int = 200
    scheme: Scheme = Scheme.SEMI_IMPLICIT_ITERATIVE
    forcing: ForcingFunction | None = None

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.nu < 0:
            raise ValueError(f"nu must be nonnegative, got {self.nu}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")


@dataclass(frozen=True)
class StepResult:
    """State after one step plus the iteration bookkeeping."""

    state: SpectralVectorField
    iterations_used: int
    final_residual: float
    residual_history: tuple[float, ...] = ()


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step monitoring data emitted by run()."""

    step: int
    time: float
    l2_energy: float
    h1_norm: float
    hs_norms: dict[float, float] = field(default_factory=dict)
    picard_iterations: int = 0
    final_residual: float = 0.0
    errors: dict[str, float] | None = None


@dataclass(frozen=True)
class RunResult:
    final_state: SpectralVectorField
    records: list[DiagnosticsRecord]


Observer = Callable[[DiagnosticsRecord, SpectralVectorField], None]


@lru_cache(maxsize=64)
def _viscous_multiplier(grid: PhysicalGrid, tau: float, nu: float) -> np.ndarray:
    mult = 1.0 / (1.0 + tau * nu * grid.k_squared)
    mult.setflags(write=False)
    return mult


def implicit_viscous_solve(rhs: Field, tau: float, nu: float) -> Field:
    """Apply (I - tau nu Laplacian)^{-1}, diagonal in Fourier space."""
    if isinstance(rhs, SpectralVectorField):
        return SpectralVectorField(
            implicit_viscous_solve(rhs.u1, tau, nu),
            implicit_viscous_solve(rhs.u2, tau, nu),
        )
    mult = _viscous_multiplier(rhs.grid, float(tau), float(nu))
    return SpectralScalarField(rhs.grid, mult * rhs.coefficients, rhs.truncation_radius)


def _resolve_truncation(u: SpectralVectorField, cfg: StepperConfig) -> int:
    return u.truncation_radius if cfg.truncation is None else cfg.truncation


def _sampled_forcing(cfg: StepperConfig, t: float, grid: PhysicalGrid, radius: int) -> SpectralVectorField | None:
    if cfg.forcing is None:
        return None
    f = cfg.forcing(t)
    if f.grid != grid:
        raise ValueError("forcing returned a field on the wrong grid")
    return leray_project(truncate(f, radius))


def picard_step(u_n: SpectralVectorField, cfg: StepperConfig, t_n: float = 0.0) -> StepResult:
    """Advance one step of the semi-implicit scheme by fixed-point iteration.

    Iterates u^{(m+1)} = (I - tau nu Lap)^{-1} [u^n - tau Pi_N P((u^n . grad) u^{(m)})
    + tau f_n] from u^{(0)} = u^n until the L2 increment drops below
    cfg.tolerance.  Raises PicardDivergenceError when the budget is
    exhausted and NonFiniteStateError when the iterates blow up.
    """
    radius = _resolve_truncation(u_n, cfg)
    transport = Advection(u_n)
    base = u_n
    forcing = _sampled_forcing(cfg, t_n, u_n.grid, radius)
    if forcing is not None:
        base = base + cfg.tau * forcing
    current = u_n
    history: list[float] = []
    residual = math.inf
    # Overflow here is an expected symptom of a too-large step, reported
    # through NonFiniteStateError rather than a warning.
    with np.errstate(over="ignore", invalid="ignore"):
        for iteration in range(1, cfg.max_iterations + 1):
            candidate = implicit_viscous_solve(
                base - cfg.tau * transport(current, radius), cfg.tau, cfg.nu
            )
            residual = l2_norm(candidate - current)
            if not np.isfinite(residual):
                raise NonFiniteStateError(
                    f"iterates became non-finite after {iteration} iterations"
                )
            history.append(residual)
            current = candidate
            if residual < cfg.tolerance:
                return StepResult(current, iteration, residual, tuple(history))
    raise PicardDivergenceError(cfg.max_iterations, residual)


def explicit_step(u_n: SpectralVectorField, cfg: StepperConfig, t_n: float = 0.0) -> StepResult:
    """Advance one step with the transport term frozen at the old time level."""
    radius = _resolve_truncation(u_n, cfg)
    with np.errstate(over="ignore", invalid="ignore"):
        rhs = u_n - cfg.tau * Advection(u_n)(u_n, radius)
        forcing = _sampled_forcing(cfg, t_n, u_n.grid, radius)
        if forcing is not None:
            rhs = rhs + cfg.tau * forcing
        state = implicit_viscous_solve(rhs, cfg.tau, cfg.nu)
        if not np.isfinite(l2_norm(state)):
            raise NonFiniteStateError("explicit step produced non-finite coefficients")
    return StepResult(state, 1, 0.0, ())


def step(u_n: SpectralVectorField, cfg: StepperConfig, t_n: float = 0.0) -> StepResult:
    if cfg.scheme is Scheme.EXPLICIT_TRANSPORT:
        return explicit_step(u_n, cfg, t_n)
    return picard_step(u_n, cfg, t_n)


def step_count(horizon: float, tau: float) -> int:
    """Number of steps for the horizon; requires T to be a multiple of tau.

    A silent partial final step would corrupt convergence studies, so a
    non-divisible horizon is rejected instead.
    """
    if horizon <= 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    steps = round(horizon / tau)
    if steps < 1 or abs(steps * tau - horizon) > 1e-9 * max(1.0, abs(horizon)):
        raise ValueError(f"horizon {horizon} is not an integer multiple of tau {tau}")
    return steps


def run(
    u0: SpectralVectorField,
    cfg: StepperConfig,
    horizon: float,
    observers: Sequence[Observer] = (),
    record_norms: Iterable[float] = (),
) -> RunResult:
    """Advance from the projected, truncated initial state to the horizon.

    The initial state is recorded as step 0, then one DiagnosticsRecord is
    emitted per step and handed to every observer together with the state.
    """
    steps = step_count(horizon, cfg.tau)
    radius = u0.grid.default_truncation if cfg.truncation is None else cfg.truncation
    norms = tuple(record_norms)
    u = leray_project(truncate(u0, radius))

    def make_record(
        state: SpectralVectorField, index: int, time: float, result: StepResult | None
    ) -> DiagnosticsRecord:
        return DiagnosticsRecord(
            step=index,
            time=time,
            l2_energy=l2_norm(state),
            h1_norm=sobolev_norm(state, 1.0),
            hs_norms={s: sobolev_norm(state, s) for s in norms},
            picard_iterations=0 if result is None else result.iterations_used,
            final_residual=0.0 if result is None else result.final_residual,
        )

    records = [make_record(u, 0, 0.0, None)]
    for observer in observers:
        observer(records[0], u)
    for index in range(1, steps + 1):
        t_n = (index - 1) * cfg.tau
        try:
            result = step(u, cfg, t_n)
        except SolverError as exc:
            raise StepFailedError(index, t_n, exc) from exc
        u = result.state
        record = make_record(u, index, index * cfg.tau, result)
        records.append(record)
        for observer in observers:
            observer(record, u)
    return RunResult(u, records)
