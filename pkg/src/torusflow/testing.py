"""Seeded random field generators shared by the check suite and the tests."""

from __future__ import annotations

import numpy as np

from .spectral import (
    PhysicalGrid,
    SpectralScalarField,
    SpectralVectorField,
    leray_project,
    sobolev_norm,
)


def random_scalar_field(
    grid: PhysicalGrid,
    rng: np.random.Generator,
    decay: float = 2.0,
    truncation_radius: int | None = None,
) -> SpectralScalarField:
    """Random real field with a power-law spectral envelope (1 + |k|^2)^(-decay/2)."""
    field = SpectralScalarField.from_physical(
        grid, rng.standard_normal((grid.points_per_axis,) * 2), truncation_radius
    )
    envelope = (1.0 + grid.k_squared) ** (-decay / 2.0)
    return SpectralScalarField(
        grid, field.coefficients * envelope, field.truncation_radius
    )


def random_vector_field(
    grid: PhysicalGrid,
    rng: np.random.Generator,
    decay: float = 2.0,
    truncation_radius: int | None = None,
) -> SpectralVectorField:
    return SpectralVectorField(
        random_scalar_field(grid, rng, decay, truncation_radius),
        random_scalar_field(grid, rng, decay, truncation_radius),
    )


def random_divergence_free_field(
    grid: PhysicalGrid,
    rng: np.random.Generator,
    decay: float = 2.0,
    truncation_radius: int | None = None,
) -> SpectralVectorField:
    return leray_project(random_vector_field(grid, rng, decay, truncation_radius))


def random_gradient_field(
    grid: PhysicalGrid, rng: np.random.Generator, decay: float = 2.0
) -> SpectralVectorField:
    """A pure gradient, which the Leray projection must annihilate."""
    phi = random_scalar_field(grid, rng, decay)
    kx, ky = grid.wavevectors
    return SpectralVectorField(
        SpectralScalarField(grid, 1j * kx * phi.coefficients, phi.truncation_radius),
        SpectralScalarField(grid, 1j * ky * phi.coefficients, phi.truncation_radius),
    )


def unit_sobolev_state(
    grid: PhysicalGrid,
    rng: np.random.Generator,
    s: float = 3.0,
    truncation_radius: int | None = None,
) -> SpectralVectorField:
    """Random divergence-free state normalized to unit H^s norm."""
    v = random_divergence_free_field(grid, rng, decay=s + 1.0, truncation_radius=truncation_radius)
    norm = sobolev_norm(v, s)
    if norm == 0.0:
        raise ValueError("degenerate random state")
    return (1.0 / norm) * v
