"""Fast runtime checks of the solver's structural invariants.

Each check runs in seconds on a desk-size grid and reports pass/fail with
a one-line detail.  The contraction check accepts tau/nu overrides so a
deliberately unstable step size can be probed; it then fails loudly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import testing
from .scenarios import (
    double_shear_scenario,
    manufactured_forcing,
    manufactured_velocity,
    taylor_green_family,
)
from .spectral import (
    PhysicalGrid,
    SpectralScalarField,
    SpectralVectorField,
    convective_term,
    fractional_lambda,
    inner_product,
    inverse_transform,
    l2_norm,
    leray_project,
    sobolev_norm,
    truncate,
)
from .stepping import SolverError, StepperConfig, picard_step, run
from .diagnostics import energy_violations


@dataclass(frozen=True)
class CheckOptions:
    grid_points: int = 48
    seed: int = 0
    samples: int = 20
    tau: float | None = None
    nu: float | None = None


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _worst(values) -> float:
    return float(max(values))


def check_transform_roundtrip(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(opts.grid_points)
    rng = np.random.default_rng(opts.seed)
    defects = []
    for _ in range(opts.samples):
        f = testing.random_scalar_field(grid, rng)
        vals = inverse_transform(f).values
        again = SpectralScalarField.from_physical(grid, vals, f.truncation_radius)
        scale = max(np.max(np.abs(vals)), 1e-30)
        defects.append(np.max(np.abs(inverse_transform(again).values - vals)) / scale)
        cscale = max(np.max(np.abs(f.coefficients)), 1e-30)
        defects.append(np.max(np.abs(again.coefficients - f.coefficients)) / cscale)
    worst = _worst(defects)
    return CheckResult("transform-roundtrip", worst <= 1e-12, f"worst relative defect {worst:.2e}")


def check_parseval(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(opts.grid_points)
    rng = np.random.default_rng(opts.seed)
    defects = []
    for _ in range(opts.samples):
        f = testing.random_scalar_field(grid, rng)
        vals = inverse_transform(f).values
        quadrature = np.sqrt(np.sum(vals**2) * grid.spacing**2)
        defects.append(abs(sobolev_norm(f, 0.0) - quadrature) / max(quadrature, 1e-30))
    worst = _worst(defects)
    return CheckResult("parseval", worst <= 1e-12, f"worst relative defect {worst:.2e}")


def check_truncation(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(opts.grid_points)
    rng = np.random.default_rng(opts.seed)
    radius = grid.default_truncation // 2
    defects = []
    for _ in range(opts.samples):
        f = testing.random_scalar_field(grid, rng)
        g = testing.random_scalar_field(grid, rng)
        tf_once = truncate(f, radius)
        defects.append(np.max(np.abs(truncate(tf_once, radius).coefficients - tf_once.coefficients)))
        lhs = inner_product(tf_once, g)
        rhs = inner_product(f, truncate(g, radius))
        defects.append(abs(lhs - rhs) / max(abs(lhs), 1e-30))
    worst = _worst(defects)
    return CheckResult(
        "truncation-projection", worst <= 1e-12, f"idempotence and self-adjointness defect {worst:.2e}"
    )


def check_leray(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(opts.grid_points)
    rng = np.random.default_rng(opts.seed)
    defects = []
    for _ in range(opts.samples):
        v = testing.random_vector_field(grid, rng)
        pv = leray_project(v)
        defects.append(l2_norm(leray_project(pv) - pv) / max(l2_norm(pv), 1e-30))
        defects.append(pv.divergence_defect() / max(l2_norm(pv), 1e-30))
        grad = testing.random_gradient_field(grid, rng)
        defects.append(l2_norm(leray_project(grad)) / max(l2_norm(grad), 1e-30))
        df = testing.random_divergence_free_field(grid, rng)
        defects.append(l2_norm(leray_project(df) - df) / max(l2_norm(df), 1e-30))
    worst = _worst(defects)
    return CheckResult("leray-projection", worst <= 1e-12, f"worst relative defect {worst:.2e}")


def check_convective_orthogonality(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(opts.grid_points)
    rng = np.random.default_rng(opts.seed)
    defects = []
    for _ in range(opts.samples):
        a = testing.random_divergence_free_field(grid, rng)
        b = testing.random_divergence_free_field(grid, rng)
        a = (1.0 / l2_norm(a)) * a
        b = (1.0 / l2_norm(b)) * b
        defects.append(abs(inner_product(convective_term(a, b), b)))
    worst = _worst(defects)
    return CheckResult(
        "convective-orthogonality", worst <= 1e-12, f"worst |<(a.grad)b, b>| = {worst:.2e}"
    )


def _brute_force_transport(a: SpectralVectorField, b: SpectralVectorField, radius: int) -> SpectralVectorField:
    """O(N^4) Fourier-space convolution of Pi_N P((a.grad) b); small grids only."""
    grid = a.grid
    m = grid.points_per_axis
    ks = np.fft.fftfreq(m, 1.0 / m).astype(int)
    modes = [
        (int(k1), int(k2))
        for k1 in ks
        for k2 in ks
        if abs(a.u1.coefficients[k1 % m, k2 % m]) + abs(a.u2.coefficients[k1 % m, k2 % m]) > 0
    ]
    out1 = np.zeros((m, m), dtype=np.complex128)
    out2 = np.zeros((m, m), dtype=np.complex128)
    for k1 in ks:
        for k2 in ks:
            if max(abs(k1), abs(k2)) > radius:
                continue
            s1 = 0.0j
            s2 = 0.0j
            for p1, p2 in modes:
                q1, q2 = int(k1 - p1), int(k2 - p2)
                if max(abs(q1), abs(q2)) > grid.default_truncation:
                    continue
                a1 = a.u1.coefficients[p1 % m, p2 % m]
                a2 = a.u2.coefficients[p1 % m, p2 % m]
                transport = a1 * (1j * q1) + a2 * (1j * q2)
                s1 += transport * b.u1.coefficients[q1 % m, q2 % m]
                s2 += transport * b.u2.coefficients[q1 % m, q2 % m]
            out1[k1 % m, k2 % m] = s1
            out2[k1 % m, k2 % m] = s2
    scale = 1.0 / (2.0 * np.pi) ** 2
    field = SpectralVectorField.from_coefficients(grid, out1 * scale, out2 * scale, radius)
    return leray_project(field)


def check_dealiasing(opts: CheckOptions) -> CheckResult:
    rng = np.random.default_rng(opts.seed)
    defects = []
    for m in (8, 12, 16):
        grid = PhysicalGrid(m)
        radius = m // 3
        for _ in range(3):
            a = leray_project(truncate(testing.random_vector_field(grid, rng), radius))
            b = leray_project(truncate(testing.random_vector_field(grid, rng), radius))
            fast = truncate(convective_term(a, b), radius)
            slow = _brute_force_transport(a, b, radius)
            defects.append(l2_norm(fast - slow) / max(l2_norm(slow), 1e-30))
    worst = _worst(defects)
    return CheckResult(
        "dealiasing-bruteforce", worst <= 1e-12, f"worst relative gap to convolution {worst:.2e}"
    )


def check_contraction(opts: CheckOptions) -> CheckResult:
    """Fixed-point increments must at least halve when tau <= min(0.01 nu, 0.1/N).

    With an override that breaks the step-size condition the iteration is
    expected to fail; the check then reports FAIL with the failure reason.
    """
    grid = PhysicalGrid(opts.grid_points)
    radius = grid.default_truncation
    nu = 0.1 if opts.nu is None else opts.nu
    tau = min(0.01 * nu, 0.1 / radius) if opts.tau is None else opts.tau
    rng = np.random.default_rng(opts.seed)
    worst_ratio = 0.0
    for _ in range(10):
        state = testing.unit_sobolev_state(grid, rng, s=3.0)
        cfg = StepperConfig(tau=tau, nu=nu)
        try:
            result = picard_step(state, cfg)
        except SolverError as exc:
            return CheckResult("contraction", False, f"tau={tau:g} nu={nu:g}: {exc}")
        history = result.residual_history
        ratios = [b / a for a, b in zip(history, history[1:]) if a > 0]
        if ratios:
            worst_ratio = max(worst_ratio, max(ratios))
    return CheckResult(
        "contraction",
        worst_ratio <= 0.5,
        f"tau={tau:g} nu={nu:g}: worst increment ratio {worst_ratio:.3f}",
    )


def check_energy_monotone(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(max(opts.grid_points, 64))
    scenario = double_shear_scenario()
    cfg = StepperConfig(tau=1e-3, nu=1e-3)
    result = run(scenario.initial_velocity(grid), cfg, 50e-3)
    violations = energy_violations(result.records, tolerance=1e-12)
    return CheckResult(
        "energy-monotone",
        not violations,
        f"{len(violations)} energy increases over {len(result.records) - 1} steps",
    )


def check_h1_dissipation(opts: CheckOptions) -> CheckResult:
    """Conditional gradient-energy decay when tau <= 0.01 nu."""
    grid = PhysicalGrid(max(opts.grid_points, 64))
    nu = 0.1
    tau = 1e-3
    u = leray_project(truncate(taylor_green_family(2, grid), grid.default_truncation))
    cfg = StepperConfig(tau=tau, nu=nu)
    worst = -np.inf
    for _ in range(30):
        result = picard_step(u, cfg)
        new = result.state
        grad_old = l2_norm(fractional_lambda(u, 1.0)) ** 2
        grad_new = l2_norm(fractional_lambda(new, 1.0)) ** 2
        grad_step = l2_norm(fractional_lambda(new - u, 1.0)) ** 2
        worst = max(worst, grad_new + grad_step - grad_old)
        u = new
    return CheckResult(
        "h1-dissipation", worst <= 1e-10, f"worst gradient-energy slack {worst:.2e}"
    )


def check_forcing_identity(opts: CheckOptions) -> CheckResult:
    grid = PhysicalGrid(128)
    defects = []
    for t in (0.0, 0.5, 1.0):
        u = manufactured_velocity(t, grid)
        f = manufactured_forcing(t, grid)
        residual = (-1.0) * u + leray_project(convective_term(u, u)) - f
        defects.append(l2_norm(residual))
    worst = _worst(defects)
    return CheckResult("forcing-identity", worst <= 1e-10, f"worst residual {worst:.2e}")


CHECKS: dict[str, Callable[[CheckOptions], CheckResult]] = {
    "transform-roundtrip": check_transform_roundtrip,
    "parseval": check_parseval,
    "truncation-projection": check_truncation,
    "leray-projection": check_leray,
    "convective-orthogonality": check_convective_orthogonality,
    "dealiasing-bruteforce": check_dealiasing,
    "contraction": check_contraction,
    "energy-monotone": check_energy_monotone,
    "h1-dissipation": check_h1_dissipation,
    "forcing-identity": check_forcing_identity,
}


def run_checks(names: list[str] | None, opts: CheckOptions) -> list[CheckResult]:
    selected = list(CHECKS) if not names else names
    results = []
    for name in selected:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}; available: {', '.join(CHECKS)}")
        results.append(CHECKS[name](opts))
    return results
