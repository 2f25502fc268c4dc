import numpy as np
import pytest

from torusflow import testing
from torusflow.scenarios import (
    RHO_SHEAR,
    centered_meshes,
    double_shear_vorticity,
    gaussian_vortices_vorticity,
    get_scenario,
    manufactured_forcing,
    manufactured_velocity,
    taylor_green_family,
    velocity_from_vorticity,
)
from torusflow.spectral import (
    PhysicalGrid,
    SpectralScalarField,
    convective_term,
    curl,
    fractional_lambda,
    inverse_transform,
    l2_norm,
    leray_project,
    truncate,
)


def _value_at(field, grid, x, y):
    vals = inverse_transform(field).values
    i = int(round(x / grid.spacing)) % grid.points_per_axis
    j = int(round(y / grid.spacing)) % grid.points_per_axis
    return vals[..., i, j]


class TestTaylorGreenFamily:
    def test_point_value_m1(self):
        grid = PhysicalGrid(64)
        u = taylor_green_family(1, grid)
        u1, u2 = _value_at(u, grid, np.pi / 2, 0.0)
        assert u1 == pytest.approx(0.0, abs=1e-12)
        assert u2 == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("m", [1, 2, 8, 20])
    def test_divergence_free(self, m):
        grid = PhysicalGrid(128)
        u = taylor_green_family(m, grid)
        assert u.divergence_defect() <= 1e-12 * l2_norm(u)

    def test_m2_band_limited(self):
        # products of degree <= 3 monomials live inside |k|_inf <= 3
        grid = PhysicalGrid(64)
        u = taylor_green_family(2, grid)
        inside = truncate(u, 3)
        outside_mass = np.sqrt(max(l2_norm(u) ** 2 - l2_norm(inside) ** 2, 0.0))
        assert outside_mass <= 1e-12 * l2_norm(u)

    def test_mean_free(self):
        grid = PhysicalGrid(64)
        u = taylor_green_family(2, grid)
        assert abs(u.u1.coefficients[0, 0]) < 1e-12
        assert abs(u.u2.coefficients[0, 0]) < 1e-12

    def test_rejects_nonpositive_m(self):
        with pytest.raises(ValueError):
            taylor_green_family(0, PhysicalGrid(16))


class TestDoubleShear:
    def test_point_values_on_the_layers(self):
        grid = PhysicalGrid(128)
        w = double_shear_vorticity(grid)
        vals = inverse_transform(w).values
        # (0, -pi/2) lies on a grid node: index j with y_j - 2pi = -pi/2
        j_minus = int(round((3 * np.pi / 2) / grid.spacing))
        assert vals[0, j_minus] == pytest.approx(-0.05 - 15.0 / np.pi, rel=1e-6)
        j_plus = int(round((np.pi / 2) / grid.spacing))
        assert vals[0, j_plus] == pytest.approx(-0.05 + 15.0 / np.pi, rel=1e-6)

    def test_mean_nearly_zero(self):
        grid = PhysicalGrid(128)
        w = double_shear_vorticity(grid)
        mean = w.coefficients[0, 0].real / (2 * np.pi) ** 2
        assert abs(mean) < 1e-3

    def test_width_must_be_positive(self):
        with pytest.raises(ValueError):
            double_shear_vorticity(PhysicalGrid(16), rho0=0.0)


class TestGaussianVortices:
    def test_point_values(self):
        grid = PhysicalGrid(128)
        w = gaussian_vortices_vorticity(grid)
        vals = inverse_transform(w).values
        assert vals[0, 0] == pytest.approx(2.0 * np.exp(-5.0 * np.pi**2 / 16.0), abs=1e-9)
        i = int(round((np.pi / 4) / grid.spacing))
        assert vals[i, 0] == pytest.approx(1.0 + np.exp(-5.0 * (np.pi / 2) ** 2), abs=1e-9)

    def test_mirror_symmetry(self):
        grid = PhysicalGrid(64)
        vals = inverse_transform(gaussian_vortices_vorticity(grid)).values
        mirrored = np.roll(vals[::-1, :], 1, axis=0)  # x -> -x on the periodic grid
        assert np.max(np.abs(vals - mirrored)) < 1e-12


class TestVelocityFromVorticity:
    def test_cosine_vorticity(self):
        grid = PhysicalGrid(32)
        x, _ = grid.meshes()
        w = SpectralScalarField.from_physical(grid, np.cos(x))
        u = velocity_from_vorticity(w)
        vals = inverse_transform(u).values
        assert np.max(np.abs(vals[0])) < 1e-13
        assert np.allclose(vals[1], np.sin(x), atol=1e-12)

    def test_zero_vorticity(self):
        grid = PhysicalGrid(32)
        w = SpectralScalarField.zero(grid)
        assert l2_norm(velocity_from_vorticity(w)) == 0.0

    def test_curl_roundtrip_on_random_fields(self, rng):
        grid = PhysicalGrid(32)
        for _ in range(20):
            w = testing.random_scalar_field(grid, rng)
            u = velocity_from_vorticity(w)
            recovered = curl(u)
            mean_free = fractional_lambda(w, 0.0)
            assert l2_norm(recovered - mean_free) <= 1e-12 * max(l2_norm(mean_free), 1e-30)
            assert u.divergence_defect() <= 1e-12 * max(l2_norm(u), 1e-30)


class TestManufacturedSolution:
    def test_point_value(self):
        grid = PhysicalGrid(64)
        u = manufactured_velocity(0.0, grid)
        u1, u2 = _value_at(u, grid, np.pi / 2, 0.0)
        assert u1 == pytest.approx(-0.5, abs=1e-12)
        assert u2 == pytest.approx(0.0, abs=1e-12)

    def test_l2_norm_decay(self):
        grid = PhysicalGrid(64)
        for t in (0.0, 0.7, 2.0):
            expected = np.pi / np.sqrt(2.0) * np.exp(-t)
            assert l2_norm(manufactured_velocity(t, grid)) == pytest.approx(expected, rel=1e-12)

    def test_separable_time_factor(self):
        grid = PhysicalGrid(64)
        u0 = manufactured_velocity(0.0, grid)
        ut = manufactured_velocity(1.3, grid)
        scaled = float(np.exp(-1.3)) * u0
        assert np.array_equal(ut.u1.coefficients, scaled.u1.coefficients)

    def test_forcing_is_negated_velocity(self):
        grid = PhysicalGrid(64)
        for t in (0.0, 0.5, 1.0):
            gap = manufactured_forcing(t, grid) + manufactured_velocity(t, grid)
            assert l2_norm(gap) <= 1e-12

    def test_forced_system_residual(self):
        # d_t u + P((u.grad) u) - f must vanish; d_t u = -u analytically
        grid = PhysicalGrid(128)
        for t in (0.0, 0.5, 1.0):
            u = manufactured_velocity(t, grid)
            f = manufactured_forcing(t, grid)
            residual = (-1.0) * u + leray_project(convective_term(u, u)) - f
            assert l2_norm(residual) <= 1e-10

    def test_negative_time_rejected(self):
        grid = PhysicalGrid(16)
        with pytest.raises(ValueError):
            manufactured_velocity(-0.1, grid)


class TestScenarioRegistry:
    @pytest.mark.parametrize(
        "name", ["taylor-green", "double-shear", "gaussian-vortices", "manufactured"]
    )
    def test_initial_velocity_invariants(self, name):
        grid = PhysicalGrid(64)
        scenario = get_scenario(name)
        u0 = scenario.initial_velocity(grid)
        assert u0.divergence_defect() <= 1e-12 * l2_norm(u0)
        assert abs(u0.u1.coefficients[0, 0]) <= 1e-12 * l2_norm(u0)
        assert abs(u0.u2.coefficients[0, 0]) <= 1e-12 * l2_norm(u0)

    def test_exact_solution_matches_initial_state(self):
        grid = PhysicalGrid(64)
        scenario = get_scenario("manufactured")
        gap = scenario.exact_solution(0.0, grid) - scenario.initial_velocity(grid)
        assert l2_norm(gap) <= 1e-12

    def test_taylor_green_m_parsing(self):
        assert get_scenario("taylor-green", 8).name == "taylor-green-m8"
        assert get_scenario("taylor-green-m20").name == "taylor-green-m20"

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            get_scenario("kolmogorov")

    def test_centered_meshes_range(self):
        grid = PhysicalGrid(16)
        x, y = centered_meshes(grid)
        assert x.min() >= -np.pi and x.max() <= np.pi
        assert RHO_SHEAR == pytest.approx(np.pi / 15.0)
