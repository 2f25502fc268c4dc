"""Benchmark initial data and the forced reference solution.

Formulas that reference negative coordinates are evaluated with grid nodes
mapped to (-pi, pi]^2; periodicity makes the shift harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .spectral import (
    PhysicalGrid,
    SpectralScalarField,
    SpectralVectorField,
    leray_project,
)

RHO_SHEAR = np.pi / 15.0


def centered_meshes(grid: PhysicalGrid) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate arrays shifted from [0, 2pi) to (-pi, pi]."""
    x, y = grid.meshes()
    return (
        np.where(x > np.pi, x - 2.0 * np.pi, x),
        np.where(y > np.pi, y - 2.0 * np.pi, y),
    )


def taylor_green_family(m: int, grid: PhysicalGrid) -> SpectralVectorField:
    """Vortex lattice initial data; larger m sharpens the cells.

    u = (-(m/2) cos^m(x) cos^{m-1}(y) sin(y), (m/2) cos^{m-1}(x) cos^m(y) sin(x)),
    divergence free by construction.
    """
    if m < 1:
        raise ValueError(f"family index m must be a positive integer, got {m}")
    x, y = grid.meshes()
    half_m = 0.5 * m
    u1 = -half_m * np.cos(x) ** m * np.cos(y) ** (m - 1) * np.sin(y)
    u2 = half_m * np.cos(x) ** (m - 1) * np.cos(y) ** m * np.sin(x)
    # Projection scrubs the tiny aliasing divergence when 2m - 1 modes do
    # not fit on the grid.
    return leray_project(SpectralVectorField.from_physical(grid, u1, u2))


def double_shear_vorticity(grid: PhysicalGrid, rho0: float = RHO_SHEAR) -> SpectralScalarField:
    """Two opposite shear layers at y = -pi/2 and y = +pi/2 plus a weak ripple."""
    if rho0 <= 0:
        raise ValueError(f"layer width rho0 must be positive, got {rho0}")
    x, y = centered_meshes(grid)
    ripple = 0.05 * np.cos(x + np.pi)
    lower = -np.cosh((y + np.pi / 2.0) / rho0) ** -2 / rho0
    upper = np.cosh((y - np.pi / 2.0) / rho0) ** -2 / rho0
    w = ripple + np.where(y <= 0.0, lower, upper)
    return SpectralScalarField.from_physical(grid, w)


def gaussian_vortices_vorticity(grid: PhysicalGrid) -> SpectralScalarField:
    """Two like-signed Gaussian vortices at (-pi/4, 0) and (pi/4, 0).

    The tails at the domain boundary are ~exp(-5 pi^2), far below machine
    precision, so no periodization is needed.
    """
    x, y = centered_meshes(grid)
    w = np.exp(-5.0 * ((x + np.pi / 4.0) ** 2 + y**2)) + np.exp(
        -5.0 * ((x - np.pi / 4.0) ** 2 + y**2)
    )
    return SpectralScalarField.from_physical(grid, w)


def velocity_from_vorticity(w: SpectralScalarField) -> SpectralVectorField:
    """Invert w = d_x u2 - d_y u1 for the mean-free, divergence-free velocity.

    In coefficients u1 = i k2 w / |k|^2 and u2 = -i k1 w / |k|^2; the mean
    vorticity mode carries no periodic velocity and is dropped.
    """
    grid = w.grid
    kx, ky = grid.wavevectors
    denom = grid.k_squared.copy()
    denom[0, 0] = 1.0
    base = w.coefficients / denom
    c1 = 1j * ky * base
    c2 = -1j * kx * base
    c1[0, 0] = 0.0
    c2[0, 0] = 0.0
    return SpectralVectorField(
        SpectralScalarField(grid, c1, w.truncation_radius),
        SpectralScalarField(grid, c2, w.truncation_radius),
    )


@lru_cache(maxsize=8)
def _decaying_vortex_base(grid: PhysicalGrid) -> SpectralVectorField:
    x, y = grid.meshes()
    return SpectralVectorField.from_physical(
        grid, -0.5 * np.sin(x) * np.cos(y), 0.5 * np.cos(x) * np.sin(y)
    )


def manufactured_velocity(t: float, grid: PhysicalGrid) -> SpectralVectorField:
    """Reference solution (-0.5 e^{-t} sin x cos y, 0.5 e^{-t} cos x sin y)."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return float(np.exp(-t)) * _decaying_vortex_base(grid)


def manufactured_forcing(t: float, grid: PhysicalGrid) -> SpectralVectorField:
    """Forcing that makes the reference field solve the inviscid system.

    d_t u + P((u . grad) u) = f with the projected transport term vanishing
    identically for this field, so f(t) = -u(t).  The forcing carries no
    viscosity contribution; with nu > 0 the solver then commits an O(nu)
    error against the reference, which is what the viscosity sweeps measure.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return float(-np.exp(-t)) * _decaying_vortex_base(grid)


InitialCondition = Callable[[PhysicalGrid], SpectralVectorField]
TimeDependentField = Callable[[float, PhysicalGrid], SpectralVectorField]


@dataclass(frozen=True)
class Scenario:
    """Named initial condition with optional exact solution and forcing."""

    name: str
    description: str
    initial_velocity: InitialCondition
    exact_solution: TimeDependentField | None = None
    forcing: TimeDependentField | None = None

    def forcing_on(self, grid: PhysicalGrid) -> Callable[[float], SpectralVectorField] | None:
        if self.forcing is None:
            return None
        forcing = self.forcing
        return lambda t: forcing(t, grid)


def taylor_green_scenario(m: int = 2) -> Scenario:
    return Scenario(
        name=f"taylor-green-m{m}",
        description=f"vortex lattice initial data with sharpness index m={m}",
        initial_velocity=lambda grid: taylor_green_family(m, grid),
    )


def double_shear_scenario() -> Scenario:
    return Scenario(
        name="double-shear",
        description="double shear layer, width pi/15, with a 5% ripple",
        initial_velocity=lambda grid: velocity_from_vorticity(double_shear_vorticity(grid)),
    )


def gaussian_vortices_scenario() -> Scenario:
    return Scenario(
        name="gaussian-vortices",
        description="pair of Gaussian vortices that orbit and merge",
        initial_velocity=lambda grid: velocity_from_vorticity(gaussian_vortices_vorticity(grid)),
    )


def manufactured_scenario() -> Scenario:
    return Scenario(
        name="manufactured",
        description="decaying vortex with exact solution and matching forcing",
        initial_velocity=lambda grid: manufactured_velocity(0.0, grid),
        exact_solution=manufactured_velocity,
        forcing=manufactured_forcing,
    )


SCENARIO_NAMES = ("taylor-green", "double-shear", "gaussian-vortices", "manufactured")


def get_scenario(name: str, m: int = 2) -> Scenario:
    """Look up a scenario; 'taylor-green' takes the family index m."""
    if name == "taylor-green" or name == f"taylor-green-m{m}":
        return taylor_green_scenario(m)
    if name.startswith("taylor-green-m"):
        return taylor_green_scenario(int(name.removeprefix("taylor-green-m")))
    if name == "double-shear":
        return double_shear_scenario()
    if name == "gaussian-vortices":
        return gaussian_vortices_scenario()
    if name == "manufactured":
        return manufactured_scenario()
    raise KeyError(f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}")
