"""Error norms against exact solutions, per-step monitors, and sweeps.

The error-table conventions mirror the reference results this solver is
verified against: the H^s error column is the composite
||e||_L2 + ||Lambda^s e||_L2, and the Linf column sums the sup norms of
the two velocity components, max|e_1| + max|e_2| over the grid.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .scenarios import Scenario
from .spectral import (
    PhysicalField,
    PhysicalGrid,
    SpectralVectorField,
    curl,
    fractional_lambda,
    inverse_transform,
    l2_norm,
    truncate,
)
from .stepping import (
    DiagnosticsRecord,
    RunResult,
    Scheme,
    SolverError,
    StepperConfig,
    run,
)

_HS_PATTERN = re.compile(r"^H(\d+(\.\d+)?)$")


def parse_norm_name(name: str) -> tuple[str, float | None]:
    """Split a norm label into ('l2'|'linf'|'hs', s)."""
    if name == "L2":
        return ("l2", None)
    if name == "Linf":
        return ("linf", None)
    match = _HS_PATTERN.match(name)
    if match:
        return ("hs", float(match.group(1)))
    raise ValueError(f"unknown norm name {name!r}; expected L2, Linf, or H<s>")


def _aligned_difference(u: SpectralVectorField, exact: SpectralVectorField) -> SpectralVectorField:
    if u.grid != exact.grid:
        raise ValueError("grid mismatch between numerical and exact fields")
    radius = max(u.truncation_radius, exact.truncation_radius)
    return truncate(u, radius) - truncate(exact, radius)


def error_norms(
    u: SpectralVectorField,
    exact: SpectralVectorField,
    norms: Sequence[str],
) -> dict[str, float]:
    """Evaluate the requested error norms of u - exact.

    L2 is the integral norm, H<s> the composite ||e|| + ||Lambda^s e||,
    and Linf the componentwise sum of physical-space sup norms.
    """
    diff = _aligned_difference(u, exact)
    result: dict[str, float] = {}
    diff_values: np.ndarray | None = None
    base_l2: float | None = None
    for name in norms:
        kind, s = parse_norm_name(name)
        if kind == "l2":
            if base_l2 is None:
                base_l2 = l2_norm(diff)
            result[name] = base_l2
        elif kind == "linf":
            if diff_values is None:
                diff_values = inverse_transform(diff).values
            result[name] = float(
                np.max(np.abs(diff_values[0])) + np.max(np.abs(diff_values[1]))
            )
        else:
            if base_l2 is None:
                base_l2 = l2_norm(diff)
            result[name] = base_l2 + l2_norm(fractional_lambda(diff, s))
    return result


def vorticity_snapshot(u: SpectralVectorField) -> PhysicalField:
    """Scalar vorticity d_x u2 - d_y u1 evaluated on the grid."""
    return inverse_transform(curl(u))


def energy_violations(
    records: Sequence[DiagnosticsRecord], tolerance: float = 1e-12
) -> list[tuple[int, float]]:
    """Steps whose L2 energy exceeds the previous step's by more than tolerance.

    Meaningful for unforced runs only; an empty list is the expected outcome.
    """
    violations = []
    for prev, cur in zip(records, records[1:]):
        increase = cur.l2_energy - prev.l2_energy
        if increase > tolerance:
            violations.append((cur.step, increase))
    return violations


def observed_orders(errors: Sequence[float]) -> list[float]:
    """log2 of consecutive error ratios for a halving sweep."""
    return [
        float(np.log2(a / b)) if a > 0 and b > 0 else float("nan")
        for a, b in zip(errors, errors[1:])
    ]


@dataclass(frozen=True)
class SweepSpec:
    """One convergence experiment: vary one knob, hold the rest fixed."""

    vary: str
    values: tuple
    scenario: Scenario
    grid_points: int
    tau: float
    nu: float
    horizon: float
    norms: tuple[str, ...]
    truncation: int | None = None
    tolerance: float = 1e-10
    max_iterations: int = 200
    scheme: Scheme = Scheme.SEMI_IMPLICIT_ITERATIVE

    def __post_init__(self) -> None:
        if self.vary not in ("tau", "nu", "resolution"):
            raise ValueError(f"vary must be tau, nu, or resolution, got {self.vary!r}")
        values = tuple(self.values)
        if not values:
            raise ValueError("sweep needs at least one value")
        diffs = np.diff(np.asarray(values, dtype=float))
        if len(values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep values must be strictly monotone")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "norms", tuple(self.norms))
        for name in self.norms:
            parse_norm_name(name)
        if self.scenario.exact_solution is None:
            raise ValueError(f"scenario {self.scenario.name!r} has no exact solution to compare against")


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: list[tuple[float, dict[str, float]]]
    orders: dict[str, list[float]] = field(default_factory=dict)
    failure: str | None = None

    @property
    def completed(self) -> bool:
        return self.failure is None


def _sweep_run(spec: SweepSpec, value) -> tuple[RunResult, SpectralVectorField]:
    grid_points = int(value) if spec.vary == "resolution" else spec.grid_points
    tau = float(value) if spec.vary == "tau" else spec.tau
    nu = float(value) if spec.vary == "nu" else spec.nu
    grid = PhysicalGrid(grid_points)
    cfg = StepperConfig(
        tau=tau,
        nu=nu,
        truncation=spec.truncation,
        tolerance=spec.tolerance,
        max_iterations=spec.max_iterations,
        scheme=spec.scheme,
        forcing=spec.scenario.forcing_on(grid),
    )
    result = run(spec.scenario.initial_velocity(grid), cfg, spec.horizon)
    exact = spec.scenario.exact_solution(spec.horizon, grid)
    return result, exact


def convergence_sweep(spec: SweepSpec) -> SweepResult:
    """Run the sweep and tabulate errors at the horizon per swept value.

    A solver failure aborts the sweep; the rows completed so far are
    returned with the failure message attached.
    """
    rows: list[tuple[float, dict[str, float]]] = []
    failure = None
    for value in spec.values:
        try:
            result, exact = _sweep_run(spec, value)
        except SolverError as exc:
            failure = f"value {value}: {exc}"
            break
        rows.append((value, error_norms(result.final_state, exact, spec.norms)))
    orders = {
        name: observed_orders([errors[name] for _, errors in rows]) for name in spec.norms
    }
    return SweepResult(spec=spec, rows=rows, orders=orders, failure=failure)
