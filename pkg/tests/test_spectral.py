import numpy as np
import pytest

from torusflow import testing
from torusflow.spectral import (
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

TWO_PI = 2.0 * np.pi


class TestGrid:
    def test_basic_properties(self):
        grid = PhysicalGrid(32)
        assert grid.spacing == pytest.approx(TWO_PI / 32)
        assert grid.default_truncation == 15
        assert grid.dimension == 2
        x, y = grid.meshes()
        assert x[1, 0] == pytest.approx(grid.spacing)
        assert y[0, 1] == pytest.approx(grid.spacing)

    @pytest.mark.parametrize("m", [3, 2, 0, -4, 7])
    def test_rejects_bad_sizes(self, m):
        with pytest.raises(ValueError):
            PhysicalGrid(m)

    def test_wavenumber_layout(self):
        grid = PhysicalGrid(8)
        assert list(grid.wavenumbers) == [0, 1, 2, 3, -4, -3, -2, -1]


class TestForwardTransform:
    def test_constant_field(self, grid32):
        f = SpectralScalarField.from_physical(grid32, np.ones((32, 32)))
        assert f.coefficients[0, 0] == pytest.approx(TWO_PI**2)
        rest = f.coefficients.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-12

    def test_single_mode(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.cos(x))
        assert f.coefficients[1, 0] == pytest.approx(TWO_PI**2 / 2)
        assert f.coefficients[-1, 0] == pytest.approx(TWO_PI**2 / 2)
        rest = f.coefficients.copy()
        rest[1, 0] = rest[-1, 0] = 0
        assert np.max(np.abs(rest)) < 1e-10

    def test_rejects_non_finite(self, grid32):
        values = np.ones((32, 32))
        values[3, 4] = np.nan
        with pytest.raises(ValueError, match="finite"):
            SpectralScalarField.from_physical(grid32, values)
        with pytest.raises(ValueError, match="finite"):
            PhysicalField(grid32, values)

    def test_roundtrip_on_random_fields(self, grid32, rng):
        for _ in range(20):
            f = testing.random_scalar_field(grid32, rng)
            vals = inverse_transform(f).values
            back = SpectralScalarField.from_physical(grid32, vals)
            scale = np.max(np.abs(vals))
            assert np.max(np.abs(inverse_transform(back).values - vals)) <= 1e-12 * scale
            cscale = np.max(np.abs(f.coefficients))
            assert np.max(np.abs(back.coefficients - f.coefficients)) <= 1e-12 * cscale

    def test_nyquist_is_zeroed(self, grid16):
        rng = np.random.default_rng(5)
        f = SpectralScalarField.from_physical(grid16, rng.standard_normal((16, 16)))
        assert np.all(f.coefficients[8, :] == 0)
        assert np.all(f.coefficients[:, 8] == 0)

    def test_physical_field_dispatch(self, grid16, rng):
        v = rng.standard_normal((2, 16, 16))
        field = forward_transform(PhysicalField(grid16, v))
        assert isinstance(field, SpectralVectorField)
        scalar = forward_transform(PhysicalField(grid16, v[0]))
        assert isinstance(scalar, SpectralScalarField)


class TestInverseTransform:
    def test_constant(self, grid32):
        c = np.zeros((32, 32), dtype=complex)
        c[0, 0] = TWO_PI**2
        f = SpectralScalarField.from_coefficients(grid32, c)
        assert np.allclose(inverse_transform(f).values, 1.0, atol=1e-13)

    def test_cosine(self, grid32):
        c = np.zeros((32, 32), dtype=complex)
        c[1, 0] = c[-1, 0] = TWO_PI**2 / 2
        f = SpectralScalarField.from_coefficients(grid32, c)
        x, _ = grid32.meshes()
        assert np.allclose(inverse_transform(f).values, np.cos(x), atol=1e-13)

    def test_symmetry_violation_rejected(self, grid32):
        c = np.zeros((32, 32), dtype=complex)
        c[1, 0] = 1.0  # conjugate partner missing
        f = SpectralScalarField.from_coefficients(grid32, c)
        with pytest.raises(ValueError, match="symmetry"):
            inverse_transform(f)


class TestTruncate:
    def test_idempotent(self, grid32, rng):
        f = testing.random_scalar_field(grid32, rng)
        once = truncate(f, 7)
        twice = truncate(once, 7)
        assert np.array_equal(once.coefficients, twice.coefficients)

    def test_single_mode_removed(self, grid32):
        c = np.zeros((32, 32), dtype=complex)
        c[3, 0] = c[-3, 0] = TWO_PI**2 / 2
        f = SpectralScalarField.from_coefficients(grid32, c)
        assert l2_norm(truncate(f, 2)) == 0.0

    def test_out_of_range_radius(self, grid32, rng):
        f = testing.random_scalar_field(grid32, rng)
        with pytest.raises(ValueError):
            truncate(f, -1)
        with pytest.raises(ValueError):
            truncate(f, 16)

    def test_self_adjoint(self, grid32, rng):
        for _ in range(20):
            f = testing.random_scalar_field(grid32, rng)
            g = testing.random_scalar_field(grid32, rng)
            lhs = inner_product(truncate(f, 6), g)
            rhs = inner_product(f, truncate(g, 6))
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-14)


class TestDerivatives:
    def test_dx_sin(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.sin(x))
        df = spectral_derivative(f, 1)
        assert np.allclose(inverse_transform(df).values, np.cos(x), atol=1e-12)

    def test_derivative_of_constant(self, grid32):
        f = SpectralScalarField.from_physical(grid32, np.ones((32, 32)))
        assert l2_norm(spectral_derivative(f, 1)) == 0.0
        assert l2_norm(spectral_derivative(f, 2)) == 0.0

    def test_laplacian_eigenfunction(self, grid32):
        x, y = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.sin(x) * np.cos(y))
        lap = spectral_derivative(f, 1, 2) + spectral_derivative(f, 2, 2)
        assert np.allclose(inverse_transform(lap).values, -2.0 * np.sin(x) * np.cos(y), atol=1e-12)

    def test_invalid_axis(self, grid32, rng):
        f = testing.random_scalar_field(grid32, rng)
        with pytest.raises(ValueError):
            spectral_derivative(f, 3)


class TestFractionalLambda:
    def test_zeroth_power_removes_mean(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, 2.0 + np.sin(x))
        g = fractional_lambda(f, 0.0)
        assert np.allclose(inverse_transform(g).values, np.sin(x), atol=1e-12)

    def test_second_power_on_unit_mode(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.sin(x))
        g = fractional_lambda(f, 2.0)
        assert np.allclose(inverse_transform(g).values, np.sin(x), atol=1e-12)

    def test_composition_equals_laplacian(self, grid32, rng):
        for _ in range(10):
            f = testing.random_scalar_field(grid32, rng)
            twice = fractional_lambda(fractional_lambda(f, 1.0), 1.0)
            lap = spectral_derivative(f, 1, 2) + spectral_derivative(f, 2, 2)
            mean_free = fractional_lambda(lap, 0.0)
            assert l2_norm(twice - (-1.0) * mean_free) <= 1e-12 * max(l2_norm(twice), 1e-30)

    def test_negative_power_rejected(self, grid32, rng):
        with pytest.raises(ValueError):
            fractional_lambda(testing.random_scalar_field(grid32, rng), -0.5)


class TestSobolevNorm:
    def test_sin_norm_s_independent(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.sin(x))
        for s in (0.5, 1.0, 2.5, 3.0, 6.0):
            assert sobolev_norm(f, s) == pytest.approx(TWO_PI, rel=1e-12)
        # s = 0 degenerates to the plain L2 norm
        assert sobolev_norm(f, 0.0) == pytest.approx(np.pi * np.sqrt(2.0), rel=1e-12)

    def test_constant_norm(self, grid32):
        f = SpectralScalarField.from_physical(grid32, np.ones((32, 32)))
        for s in (0.0, 1.0, 4.0):
            assert sobolev_norm(f, s) == pytest.approx(TWO_PI, rel=1e-12)

    def test_parseval(self, grid32, rng):
        for _ in range(20):
            f = testing.random_scalar_field(grid32, rng)
            vals = inverse_transform(f).values
            quadrature = np.sqrt(np.sum(vals**2) * grid32.spacing**2)
            assert sobolev_norm(f, 0.0) == pytest.approx(quadrature, rel=1e-12)

    def test_negative_index_rejected(self, grid32, rng):
        with pytest.raises(ValueError):
            sobolev_norm(testing.random_scalar_field(grid32, rng), -1.0)

    def test_vector_sums_components(self, grid32, rng):
        v = testing.random_vector_field(grid32, rng)
        expected = np.sqrt(sobolev_norm(v.u1, 2.0) ** 2 + sobolev_norm(v.u2, 2.0) ** 2)
        assert sobolev_norm(v, 2.0) == pytest.approx(expected, rel=1e-12)


class TestInnerProduct:
    def test_orthogonality(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.sin(x))
        g = SpectralScalarField.from_physical(grid32, np.cos(x))
        assert abs(inner_product(f, g)) < 1e-13

    def test_sin_squared(self, grid32):
        x, _ = grid32.meshes()
        f = SpectralScalarField.from_physical(grid32, np.sin(x))
        assert inner_product(f, f) == pytest.approx(2.0 * np.pi**2, rel=1e-12)

    def test_matches_quadrature(self, grid32, rng):
        for _ in range(20):
            f = testing.random_scalar_field(grid32, rng)
            g = testing.random_scalar_field(grid32, rng)
            quad = np.sum(inverse_transform(f).values * inverse_transform(g).values) * grid32.spacing**2
            assert inner_product(f, g) == pytest.approx(quad, rel=1e-12, abs=1e-13)

    def test_grid_mismatch(self, grid32, grid16, rng):
        f = testing.random_scalar_field(grid32, rng)
        g = testing.random_scalar_field(grid16, rng)
        with pytest.raises(ValueError, match="grid"):
            inner_product(f, g)


class TestLerayProjection:
    def test_fixes_divergence_free(self, grid32):
        _, y = grid32.meshes()
        v = SpectralVectorField.from_physical(grid32, np.sin(y), np.zeros((32, 32)))
        pv = leray_project(v)
        assert l2_norm(pv - v) < 1e-13

    def test_annihilates_gradients(self, grid32):
        x, y = grid32.meshes()
        v = SpectralVectorField.from_physical(
            grid32, np.cos(x) * np.cos(y), -np.sin(x) * np.sin(y)
        )
        assert l2_norm(leray_project(v)) < 1e-13

    def test_idempotent_on_random_fields(self, grid32, rng):
        for _ in range(20):
            v = testing.random_vector_field(grid32, rng)
            pv = leray_project(v)
            ppv = leray_project(pv)
            assert l2_norm(ppv - pv) <= 1e-12 * max(l2_norm(pv), 1e-30)
            assert pv.divergence_defect() <= 1e-12 * max(l2_norm(pv), 1e-30)

    def test_mean_mode_passes_through(self, grid32):
        ones = np.ones((32, 32))
        v = SpectralVectorField.from_physical(grid32, 3.0 * ones, -2.0 * ones)
        pv = leray_project(v)
        assert l2_norm(pv - v) < 1e-13


class TestConvectiveTerm:
    def test_zero_transport(self, grid32, rng):
        b = testing.random_divergence_free_field(grid32, rng)
        zero = SpectralVectorField.zero(grid32)
        assert l2_norm(convective_term(zero, b)) == 0.0

    def test_constant_argument(self, grid32, rng):
        a = testing.random_divergence_free_field(grid32, rng)
        ones = np.ones((32, 32))
        b = SpectralVectorField.from_physical(grid32, ones, 2.0 * ones)
        assert l2_norm(convective_term(a, b)) < 1e-14

    def test_orthogonality_cancellation(self, grid32, rng):
        for _ in range(20):
            a = testing.random_divergence_free_field(grid32, rng)
            b = testing.random_divergence_free_field(grid32, rng)
            a = (1.0 / l2_norm(a)) * a
            b = (1.0 / l2_norm(b)) * b
            assert abs(inner_product(convective_term(a, b), b)) <= 1e-12

    def test_grid_mismatch(self, grid32, grid16, rng):
        a = testing.random_divergence_free_field(grid32, rng)
        b = testing.random_divergence_free_field(grid16, rng)
        with pytest.raises(ValueError, match="grid"):
            convective_term(a, b)

    def test_reusable_operator_matches_one_shot(self, grid32, rng):
        a = testing.random_divergence_free_field(grid32, rng)
        transport = Advection(a)
        for _ in range(3):
            b = testing.random_divergence_free_field(grid32, rng)
            direct = convective_term(a, b)
            assert l2_norm(transport(b) - direct) == 0.0


class TestFieldInvariants:
    def test_coefficients_frozen(self, grid16, rng):
        f = testing.random_scalar_field(grid16, rng)
        with pytest.raises(ValueError):
            f.coefficients[0, 0] = 1.0

    def test_vector_component_compatibility(self, grid16, grid32, rng):
        a = testing.random_scalar_field(grid16, rng)
        b = testing.random_scalar_field(grid32, rng)
        with pytest.raises(ValueError):
            SpectralVectorField(a, b)

    def test_arithmetic_requires_same_truncation(self, grid32, rng):
        f = testing.random_scalar_field(grid32, rng)
        g = truncate(f, 4)
        with pytest.raises(ValueError, match="truncation"):
            f + g

    def test_divergence_and_curl_shapes(self, grid32, rng):
        v = testing.random_vector_field(grid32, rng)
        assert isinstance(divergence(v), SpectralScalarField)
        assert isinstance(curl(v), SpectralScalarField)

    def test_divergence_of_projected_field_vanishes(self, grid32, rng):
        v = leray_project(testing.random_vector_field(grid32, rng))
        assert l2_norm(divergence(v)) <= 1e-11 * max(l2_norm(v), 1e-30)
