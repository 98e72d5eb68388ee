import numpy as np
import pytest

from bolab import (
    Field,
    SpectralGrid,
    bessel_potential,
    fractional_derivative,
    half_derivative_commutator,
    hilbert_commutator,
    hilbert_transform,
    linear_propagator,
    propagated_position,
    spatial_derivative,
)

from conftest import moment_free_bump, random_band_limited, rel_l2, smooth_compact


def disc_l2(u):
    return u.l2_norm()


class TestHilbert:
    def test_cos_to_sin(self, grid):
        u = Field.from_function(grid, lambda x: np.cos(np.pi * x / grid.half_length))
        out = hilbert_transform(u)
        expected = np.sin(np.pi * grid.x / grid.half_length)
        assert np.max(np.abs(out.values - expected)) < 1e-12

    def test_annihilates_constants(self, grid):
        out = hilbert_transform(Field(grid, 3.7 * np.ones(grid.n_points)))
        assert np.max(np.abs(out.values)) < 1e-12

    def test_lorentzian_closed_form(self):
        # principal-value oracle: H[1/(1+x^2)] = x/(1+x^2).  The quadrature
        # below evaluates (1/pi) pv int (f(x-y)-f(x+y))/y dy on a graded
        # mesh and pins the closed form; the grid operator is then compared
        # on a window away from the domain seam.
        f = lambda x: 1.0 / (1.0 + x**2)
        closed = lambda x: x / (1.0 + x**2)

        def pv_oracle(x, levels=56, m0=24, outer=1e6):
            k = np.arange(levels)
            hi = outer * 2.0 ** (-k)
            lo = 0.5 * hi
            frac = (np.arange(m0) + 0.5) / m0
            y = (lo[:, None] + (hi - lo)[:, None] * frac[None, :]).ravel()
            w = ((hi - lo)[:, None] / m0 * np.ones(m0)[None, :]).ravel()
            return float(np.sum((f(x - y) - f(x + y)) / y * w) / np.pi)

        for x in (-3.0, -0.5, 0.0, 0.7, 2.0, 11.0):
            assert abs(pv_oracle(x) - closed(x)) < 1e-4

        g = SpectralGrid(8192, 512.0)
        out = hilbert_transform(Field.from_function(g, f))
        window = np.abs(g.x) <= 16.0
        assert np.max(np.abs(out.values[window] - closed(g.x[window]))) < 1e-4

    def test_involution_and_isometry(self, grid):
        rng = np.random.default_rng(10)
        u = random_band_limited(grid, rng, zero_mean=False)
        zero_mean = Field(grid, u.values - u.mean)
        hh = hilbert_transform(hilbert_transform(u))
        assert rel_l2(hh, Field(grid, -zero_mean.values)) < 1e-10
        assert abs(disc_l2(hilbert_transform(u)) - disc_l2(zero_mean)) < 1e-10 * disc_l2(u)


class TestFractionalDerivative:
    def test_single_mode(self, grid):
        kappa = np.pi / grid.half_length
        u = Field.from_function(grid, lambda x: np.cos(kappa * x))
        out = fractional_derivative(u, 1.0)
        assert np.max(np.abs(out.values - kappa * u.values)) < 1e-12

    def test_rejects_negative_order(self, grid):
        with pytest.raises(ValueError):
            fractional_derivative(Field.zero(grid), -0.5)

    def test_equals_hilbert_dx(self, grid):
        rng = np.random.default_rng(11)
        u = random_band_limited(grid, rng)
        a = fractional_derivative(u, 1.0)
        b = hilbert_transform(spatial_derivative(u, 1))
        assert rel_l2(a, b) < 1e-10

    def test_half_power_semigroup(self, grid):
        rng = np.random.default_rng(12)
        u = random_band_limited(grid, rng)
        twice = fractional_derivative(fractional_derivative(u, 0.5), 0.5)
        assert rel_l2(twice, fractional_derivative(u, 1.0)) < 1e-10

    def test_order_zero_identity(self, grid):
        rng = np.random.default_rng(13)
        u = random_band_limited(grid, rng, zero_mean=False)
        assert np.array_equal(fractional_derivative(u, 0.0).values, u.values)


class TestBesselPotential:
    def test_zero_order_identity(self, grid):
        rng = np.random.default_rng(14)
        u = random_band_limited(grid, rng)
        assert rel_l2(bessel_potential(u, 0.0), u) < 1e-14

    def test_second_order_identity(self, grid):
        rng = np.random.default_rng(15)
        u = random_band_limited(grid, rng)
        lhs = bessel_potential(u, 2.0)
        rhs = Field(grid, u.values - spatial_derivative(u, 2).values)
        assert rel_l2(lhs, rhs) < 1e-10

    def test_inverse(self, grid):
        rng = np.random.default_rng(16)
        u = random_band_limited(grid, rng)
        back = bessel_potential(bessel_potential(u, 1.3), -1.3)
        assert rel_l2(back, u) < 1e-10

    def test_norm_monotone(self, grid):
        rng = np.random.default_rng(17)
        u = random_band_limited(grid, rng, zero_mean=False)
        assert disc_l2(bessel_potential(u, 1.0)) >= disc_l2(u) * (1 - 1e-12)


class TestSpatialDerivative:
    def test_sin_mode(self, grid):
        kappa = np.pi / grid.half_length
        u = Field.from_function(grid, lambda x: np.sin(kappa * x))
        out = spatial_derivative(u, 1)
        assert np.max(np.abs(out.values - kappa * np.cos(kappa * grid.x))) < 1e-12

    def test_constant(self, grid):
        out = spatial_derivative(Field(grid, np.ones(grid.n_points)), 1)
        assert np.max(np.abs(out.values)) < 1e-14

    def test_composition(self, grid):
        rng = np.random.default_rng(18)
        u = random_band_limited(grid, rng)
        once_twice = spatial_derivative(spatial_derivative(u, 1), 1)
        assert rel_l2(once_twice, spatial_derivative(u, 2)) < 1e-10

    def test_rejects_bad_order(self, grid):
        with pytest.raises(ValueError):
            spatial_derivative(Field.zero(grid), 0)


class TestPropagator:
    def test_identity_at_zero(self, grid):
        rng = np.random.default_rng(19)
        u = random_band_limited(grid, rng, zero_mean=False)
        assert rel_l2(linear_propagator(u, 0.0), u) < 1e-14

    def test_unitary(self, grid):
        rng = np.random.default_rng(20)
        u = Field(grid, np.random.default_rng(20).standard_normal(grid.n_points))
        assert abs(disc_l2(linear_propagator(u, 1.0)) - disc_l2(u)) < 1e-10 * disc_l2(u)

    def test_single_mode_phase(self, grid):
        # by hand: exp(-i t k|k|) on the +/- kappa pair gives cos(kx - k^2 t)
        kappa = np.pi / grid.half_length
        t = 0.37
        u = Field.from_function(grid, lambda x: np.cos(kappa * x))
        out = linear_propagator(u, t)
        expected = np.cos(kappa * grid.x - kappa**2 * t)
        assert np.max(np.abs(out.values - expected)) < 1e-12

    def test_group_law(self, grid):
        rng = np.random.default_rng(21)
        u = Field(grid, rng.standard_normal(grid.n_points))
        for t, s in ((0.3, 0.9), (-4.0, 10.0), (7.0, -2.5)):
            lhs = linear_propagator(linear_propagator(u, s), t)
            rhs = linear_propagator(u, t + s)
            assert rel_l2(lhs, rhs) < 1e-10

    def test_inverse(self, grid):
        rng = np.random.default_rng(22)
        u = Field(grid, rng.standard_normal(grid.n_points))
        back = linear_propagator(linear_propagator(u, 2.0), -2.0)
        assert rel_l2(back, u) < 1e-10


class TestPropagatedPosition:
    def test_zero_time_is_position(self, grid):
        rng = np.random.default_rng(23)
        u = random_band_limited(grid, rng)
        out = propagated_position(u, 0.0)
        assert np.max(np.abs(out.values - grid.x * u.values)) < 1e-10

    def test_zero_field(self, grid):
        out = propagated_position(Field.zero(grid), 0.5)
        assert np.max(np.abs(out.values)) == 0.0

    def test_commutation_with_flow(self, grid):
        # Gamma(t) U(t) v0 = U(t) (x v0); needs mass- and moment-free data
        # so the flow's algebraic tails stay clear of the domain seam
        v0 = moment_free_bump(grid)
        t = 0.1
        lhs = propagated_position(linear_propagator(v0, t), t)
        rhs = linear_propagator(Field(grid, grid.x * v0.values), t)
        assert rel_l2(lhs, rhs) < 1e-6


class TestCommutators:
    def test_constant_multiplier_commutes(self, grid):
        rng = np.random.default_rng(25)
        f = random_band_limited(grid, rng)
        a = Field(grid, 2.5 * np.ones(grid.n_points))
        out = hilbert_commutator(a, f, l=0, m=1)
        assert disc_l2(out) < 1e-10 * disc_l2(f)

    def test_position_multiplier_on_mean_free(self, grid):
        # [H; x] d/dx f = 0 for int f = 0.  The sawtooth coordinate couples
        # the seam to the datum's mass and first moment, so the clean check
        # uses a datum with both killed; a mass-carrying datum shows the
        # contrast.
        f = moment_free_bump(grid)
        a = Field(grid, grid.x)
        out = hilbert_commutator(a, f, l=0, m=1)
        assert disc_l2(out) < 1e-3 * disc_l2(f)
        heavy = Field.from_function(grid, lambda x: np.exp(-(x**2) / 8.0))
        out_heavy = hilbert_commutator(a, heavy, l=0, m=1)
        assert disc_l2(out_heavy) > 1e-2 * disc_l2(heavy)

    def test_rejects_zero_orders(self, grid):
        with pytest.raises(ValueError):
            hilbert_commutator(Field.zero(grid), Field.zero(grid), l=0, m=0)

    def test_bounded_ratio_census(self, small_grid):
        # ||dx^l [H; a] dx^m f|| <= c ||d^(l+m) a||_inf ||f||; the constant
        # is probed, not asserted: the ratio must be stable under rescaling
        # of f and across draws.
        rng = np.random.default_rng(27)
        a = Field.from_function(small_grid, lambda x: np.exp(-(x**2) / 18.0))
        da_inf = np.max(np.abs(spatial_derivative(a, 1).values))
        ratios = []
        for _ in range(20):
            f = random_band_limited(small_grid, rng, n_modes=60)
            out = hilbert_commutator(a, f, l=0, m=1)
            ratios.append(disc_l2(out) / (da_inf * disc_l2(f)))
            scaled = Field(small_grid, 37.0 * f.values)
            out_scaled = hilbert_commutator(a, scaled, l=0, m=1)
            assert abs(disc_l2(out_scaled) / 37.0 - disc_l2(out)) < 1e-9 * disc_l2(out)
        ratios = np.array(ratios)
        assert ratios.max() / ratios.min() < 10.0

    def test_half_derivative_constant(self, grid):
        rng = np.random.default_rng(28)
        f = random_band_limited(grid, rng)
        phi = Field(grid, np.full(grid.n_points, 1.3))
        out = half_derivative_commutator(phi, f)
        assert disc_l2(out) < 1e-10 * disc_l2(f)

    def test_half_derivative_gaussian_pair(self, grid):
        bump = Field.from_function(grid, lambda x: np.exp(-(x**2) / 8.0))
        out = half_derivative_commutator(bump, bump)
        vals = out.values
        assert np.isfinite(disc_l2(out)) and disc_l2(out) > 0
        # construction is symmetric, so the output is even
        assert np.max(np.abs(vals[1:] - vals[1:][::-1])) < 1e-10 * np.max(np.abs(vals))

    def test_half_derivative_ratio_census(self, small_grid):
        rng = np.random.default_rng(29)
        phi = Field.from_function(small_grid, lambda x: np.exp(-(x**2) / 10.0))
        phi_norm = bessel_potential(phi, 1.0).l2_norm()
        ratios = []
        for _ in range(20):
            f = random_band_limited(small_grid, rng, n_modes=60)
            out = half_derivative_commutator(phi, f)
            ratios.append(disc_l2(out) / (phi_norm * disc_l2(f)))
        ratios = np.array(ratios)
        assert np.all(np.isfinite(ratios))
        assert ratios.max() / ratios.min() < 10.0


class TestLinearity:
    @pytest.mark.parametrize(
        "op",
        [
            hilbert_transform,
            lambda u: fractional_derivative(u, 0.5),
            lambda u: bessel_potential(u, 1.0),
            lambda u: spatial_derivative(u, 1),
            lambda u: linear_propagator(u, 0.7),
            lambda u: propagated_position(u, 0.7),
        ],
        ids=["hilbert", "half_derivative", "bessel", "dx", "propagator", "position"],
    )
    def test_operator_linearity(self, grid, op):
        rng = np.random.default_rng(30)
        f = random_band_limited(grid, rng)
        g = random_band_limited(grid, rng)
        alpha, beta = 1.7, -0.4
        lhs = op(Field(grid, alpha * f.values + beta * g.values))
        rhs = Field(grid, alpha * op(f).values + beta * op(g).values)
        assert rel_l2(lhs, rhs) < 1e-10
