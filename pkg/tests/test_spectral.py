import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from helicalns import (
    GridMismatch,
    GridSpec,
    NegativePowerOnMeanMode,
    SpectralScalarField,
    SpectralVectorField,
    abc_flow,
    curl,
    dealias_truncate,
    grad_norm_sq,
    inner_product,
    l2_norm,
    l3_norm,
    leray_project,
    neg_laplacian_pow,
    pointwise_cross,
)
from helicalns.spectral import VOLUME, forward_transform, inverse_transform

from conftest import mixed_field

VOL = (2 * np.pi) ** 3


def coords(n):
    x = 2 * np.pi * np.arange(n) / n
    return np.meshgrid(x, x, x, indexing="ij")


def single_mode(grid, k, vec):
    """Real field with c(k) = vec and c(-k) = conj(vec)."""
    c = np.zeros((3,) + (grid.n,) * 3, complex)
    idx = tuple(int(x) % grid.n for x in k)
    nidx = tuple(-int(x) % grid.n for x in k)
    c[(slice(None),) + idx] = vec
    c[(slice(None),) + nidx] = np.conj(vec)
    return SpectralVectorField(grid, c)


def random_real(grid, seed):
    return SpectralVectorField.from_physical(grid, np.random.default_rng(seed).standard_normal(
        (3,) + (grid.n,) * 3))


class TestGridSpec:
    @pytest.mark.parametrize("n", [7, 6, 9, 0, -8])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            GridSpec(n)

    def test_rejects_unknown_dealias_rule(self):
        with pytest.raises(ValueError):
            GridSpec(16, dealias="none")

    def test_wavenumber_range(self, grid16):
        k = grid16.k[0][:, 0, 0]
        assert k.min() == -7 and k.max() == 8
        assert sorted(k) == list(range(-7, 9))

    def test_geometry(self, grid16):
        assert grid16.box_length == pytest.approx(2 * np.pi)
        assert grid16.dx == pytest.approx(2 * np.pi / 16)
        assert grid16.padded_n == 24

    def test_two_thirds_mask_keeps_3k_below_n(self, grid16):
        keep = grid16.two_thirds_mask.astype(bool)
        assert np.abs(grid16.k[:, keep]).max() == 5


class TestTransforms:
    def test_round_trip_random_real_field(self, grid16):
        u = np.random.default_rng(0).standard_normal((3, 16, 16, 16))
        f = forward_transform(u, grid16)
        back = SpectralVectorField(grid16, f.coeffs).to_physical()
        assert np.max(np.abs(back - u)) <= 1e-12 * np.max(np.abs(u))

    def test_conjugate_symmetry(self, grid16):
        f = random_real(grid16, 1)
        c = f.coeffs
        neg = (-np.arange(16)) % 16
        flipped = c[:, neg][:, :, neg][:, :, :, neg]
        assert np.allclose(flipped, np.conj(c), rtol=0, atol=1e-15)

    def test_scalar_round_trip(self, grid16):
        s = np.random.default_rng(2).standard_normal((16, 16, 16))
        f = forward_transform(s, grid16)
        assert isinstance(f, SpectralScalarField)
        assert np.allclose(SpectralScalarField(grid16, f.coeffs).to_physical(), s, atol=1e-13)

    def test_inverse_matches_formula(self, grid16):
        x1, x2, x3 = coords(16)
        f = single_mode(grid16, (1, 2, -3), np.array([0.5, 0.25j, 0.0]))
        expected0 = np.cos(x1 + 2 * x2 - 3 * x3)
        expected1 = -0.5 * np.sin(x1 + 2 * x2 - 3 * x3)
        u = inverse_transform(f)
        assert np.allclose(u[0], expected0, atol=1e-14)
        assert np.allclose(u[1], expected1, atol=1e-14)

    def test_coefficients_are_read_only(self, grid16):
        f = random_real(grid16, 3)
        with pytest.raises(ValueError):
            f.coeffs[0, 1, 0, 0] = 1.0


class TestLeray:
    def test_longitudinal_mode_removed(self, grid16):
        f = single_mode(grid16, (1, 0, 0), np.array([1.0, 0, 0]))
        assert not np.any(leray_project(f).coeffs)

    def test_transverse_mode_kept(self, grid16):
        f = single_mode(grid16, (1, 0, 0), np.array([0, 1.0, 0]))
        assert np.array_equal(leray_project(f).coeffs, f.coeffs)

    def test_diagonal_mode_hand_oracle(self, grid16):
        f = single_mode(grid16, (1, 1, 0), np.array([1.0, 0, 0]))
        out = leray_project(f).coeffs[:, 1, 1, 0]
        assert np.allclose(out, [0.5, -0.5, 0.0], atol=1e-15)

    def test_mean_mode_zeroed(self, grid16):
        c = np.zeros((3, 16, 16, 16), complex)
        c[:, 0, 0, 0] = [1.0, 2.0, 3.0]
        assert not np.any(leray_project(SpectralVectorField(grid16, c)).coeffs)

    def test_output_divergence_free(self, grid16):
        p = leray_project(random_real(grid16, 4))
        assert p.divergence_residual() <= 1e-14

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2 ** 31), st.integers(0, 2 ** 31))
    def test_idempotent_and_self_adjoint(self, s1, s2):
        grid = GridSpec(16)
        f, g = random_real(grid, s1), random_real(grid, s2)
        pf, pg = leray_project(f), leray_project(g)
        assert l2_norm(leray_project(pf) - pf) <= 1e-12 * l2_norm(pf)
        lhs, rhs = inner_product(pf, g), inner_product(f, pg)
        assert abs(lhs - rhs) <= 1e-12 * l2_norm(f) * l2_norm(g)


class TestCurl:
    def _sympy_curl(self, exprs, n):
        x1, x2, x3 = sp.symbols("x1 x2 x3")
        v1, v2, v3 = exprs(x1, x2, x3)
        w = (sp.diff(v3, x2) - sp.diff(v2, x3),
             sp.diff(v1, x3) - sp.diff(v3, x1),
             sp.diff(v2, x1) - sp.diff(v1, x2))
        X = coords(n)
        vals = []
        for e in (v1, v2, v3) + w:
            fn = sp.lambdify((x1, x2, x3), e, "numpy")
            vals.append(np.broadcast_to(fn(*X), X[0].shape).astype(float))
        return np.array(vals[:3]), np.array(vals[3:])

    def test_sin_example(self, grid16):
        v, w = self._sympy_curl(lambda a, b, c: (0, 0, sp.sin(a)), 16)
        assert np.allclose(w[1], -np.cos(coords(16)[0]), atol=1e-15)
        out = curl(SpectralVectorField.from_physical(grid16, v)).to_physical()
        assert np.max(np.abs(out - w)) <= 1e-13

    def test_mixed_trig_polynomial(self, grid16):
        def exprs(a, b, c):
            return (sp.sin(2 * b) * sp.cos(c), sp.cos(a + 3 * c), sp.sin(a - b) * sp.sin(2 * c))
        v, w = self._sympy_curl(exprs, 16)
        out = curl(SpectralVectorField.from_physical(grid16, v)).to_physical()
        assert np.max(np.abs(out - w)) <= 1e-12

    def test_abc_is_fixed(self, grid32):
        v = abc_flow(grid=grid32)
        assert np.array_equal(curl(v).coeffs, v.coeffs)

    def test_zero(self, grid16):
        assert not np.any(curl(SpectralVectorField.zeros(grid16)).coeffs)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2 ** 31))
    def test_symmetric(self, seed):
        grid = GridSpec(16)
        f, g = mixed_field(grid, seed), mixed_field(grid, seed + 1)
        gap = abs(inner_product(curl(f), g) - inner_product(f, curl(g)))
        assert gap <= 1e-12 * l2_norm(f) * l2_norm(g) * grid.kmag.max()

    def test_gradient_norm_equals_curl_norm(self, grid16):
        f = mixed_field(grid16, 5)
        assert grad_norm_sq(f) == pytest.approx(l2_norm(curl(f)) ** 2, rel=1e-13)


class TestNegLaplacianPow:
    def test_alpha_zero_identity(self, grid16):
        f = random_real(grid16, 6)
        assert np.array_equal(neg_laplacian_pow(f, 0).coeffs, f.coeffs)

    def test_alpha_one_on_shell_two(self, grid16):
        f = single_mode(grid16, (0, 2, 0), np.array([1.0, 0, 0]))
        assert np.allclose(neg_laplacian_pow(f, 1).coeffs, 4 * f.coeffs, rtol=1e-15)

    def test_three_quarters_scalar(self, grid16):
        c = np.zeros((16,) * 3, complex)
        c[2, 0, 0] = c[-2, 0, 0] = 1.0
        out = neg_laplacian_pow(SpectralScalarField(grid16, c), 0.75).coeffs
        assert out[2, 0, 0] == pytest.approx(2 ** 1.5, rel=1e-15)

    def test_mean_mode_maps_to_zero(self, grid16):
        f = random_real(grid16, 7)
        assert not np.any(neg_laplacian_pow(f, 0.5).mean_mode)

    def test_negative_power_needs_zero_mean(self, grid16):
        with pytest.raises(NegativePowerOnMeanMode):
            neg_laplacian_pow(random_real(grid16, 8), -0.5)
        f = leray_project(random_real(grid16, 8))
        back = neg_laplacian_pow(neg_laplacian_pow(f, -0.5), 0.5)
        assert l2_norm(back - f) <= 1e-13 * l2_norm(f)


class TestNorms:
    def test_cos_mode_energy(self, grid16):
        f = single_mode(grid16, (1, 0, 0), np.array([0, 0.5, 0]))
        assert inner_product(f, f) == pytest.approx(VOL / 2, rel=1e-15)

    def test_distinct_modes_orthogonal(self, grid16):
        f = single_mode(grid16, (1, 0, 0), np.array([0, 1.0, 0]))
        g = single_mode(grid16, (0, 2, 1), np.array([0, 1.0, 0]))
        assert inner_product(f, g) == 0.0

    def test_abc_energy(self, grid32):
        assert l2_norm(abc_flow(grid=grid32)) ** 2 == pytest.approx(3 * VOL, rel=1e-14)

    def test_parseval_against_quadrature(self, grid16):
        f = random_real(grid16, 9)
        u = f.to_physical()
        assert inner_product(f, f) == pytest.approx(np.sum(u * u) * grid16.dx ** 3, rel=1e-12)

    def test_grid_mismatch(self, grid16, grid32):
        with pytest.raises(GridMismatch):
            inner_product(SpectralVectorField.zeros(grid16), SpectralVectorField.zeros(grid32))

    def test_l3_zero(self, grid16):
        assert l3_norm(SpectralVectorField.zeros(grid16)) == 0.0

    def test_l3_constant_magnitude(self, grid16):
        # (cos x3, sin x3, 0) has |f| = 1 everywhere
        f = single_mode(grid16, (0, 0, 1), np.array([0.5, -0.5j, 0]))
        assert l3_norm(f) == pytest.approx(2 * np.pi, rel=1e-14)

    def test_l3_sin_quadrature_oracle(self):
        grid = GridSpec(64)
        f = single_mode(grid, (1, 0, 0), np.array([-0.5j, 0, 0]))
        integral, _ = quad(lambda x: abs(np.sin(x)) ** 3, 0, 2 * np.pi)
        assert integral == pytest.approx(8 / 3, rel=1e-12)
        expected = ((2 * np.pi) ** 2 * integral) ** (1 / 3)
        # |sin|^3 has a third-derivative jump, so the Riemann sum converges like n^-4
        assert l3_norm(f) == pytest.approx(expected, rel=1e-6)
        coarse = single_mode(GridSpec(32), (1, 0, 0), np.array([-0.5j, 0, 0]))
        ratio = (l3_norm(coarse) - expected) / (l3_norm(f) - expected)
        assert 14 < ratio < 18


class TestPointwiseCross:
    def test_self_cross_vanishes(self, grid16):
        f = mixed_field(grid16, 10)
        assert np.max(np.abs(pointwise_cross(f, f).coeffs)) <= 1e-16

    def test_beltrami(self, grid16):
        v = abc_flow(grid=grid16)
        assert np.max(np.abs(pointwise_cross(curl(v), v).coeffs)) <= 1e-15

    def test_hand_example(self, grid16):
        c = np.zeros((3, 16, 16, 16), complex)
        c[0, 0, 0, 0] = 1.0
        f = SpectralVectorField(grid16, c)
        g = single_mode(grid16, (1, 0, 0), np.array([0, 0.5, 0]))
        out = pointwise_cross(f, g).to_physical()
        x1 = coords(16)[0]
        assert np.allclose(out[2], np.cos(x1), atol=1e-15)
        assert np.allclose(out[:2], 0, atol=1e-15)

    def test_alias_free_against_exact_product(self, grid16):
        # both factors live on |k_j| <= 5, so the exact product fits on a 32 lattice
        f, g = mixed_field(grid16, 11), mixed_field(grid16, 12)
        big = GridSpec(32)

        def embed(h):
            from helicalns.spectral import pad_coeffs
            return SpectralVectorField(big, pad_coeffs(h.coeffs, 16, 32))

        u, w = embed(f).to_physical(), embed(g).to_physical()
        exact = SpectralVectorField.from_physical(big, np.cross(u, w, axis=0)).coeffs
        ours = pointwise_cross(f, g).coeffs
        keep = np.r_[0:8, 25:32]
        ref = exact[:, keep][:, :, keep][:, :, :, keep]
        mask = np.ones(16, bool)
        mask[8] = False
        assert np.max(np.abs(ours[:, mask][:, :, mask][:, :, :, mask] - ref)) <= 1e-15

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2 ** 31), st.floats(-3, 3), st.floats(-3, 3))
    def test_bilinear_antisymmetric(self, seed, a, b):
        grid = GridSpec(16)
        f, g, h = (mixed_field(grid, seed + i) for i in range(3))
        lhs = pointwise_cross(a * f + b * g, h)
        rhs = a * pointwise_cross(f, h) + b * pointwise_cross(g, h)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) <= 1e-14
        anti = pointwise_cross(f, g) + pointwise_cross(g, f)
        assert np.max(np.abs(anti.coeffs)) <= 1e-16

    def test_dealias_truncate(self, grid16):
        f = random_real(grid16, 13)
        t = dealias_truncate(f)
        outside = ~grid16.two_thirds_mask.astype(bool)
        assert not np.any(t.coeffs[:, outside])
        assert np.array_equal(t.coeffs[:, ~outside], f.coeffs[:, ~outside])


def test_volume_constant():
    assert VOLUME == VOL
