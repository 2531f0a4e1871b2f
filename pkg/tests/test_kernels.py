import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfcx

from lkspide.kernels import (
    ModelParams,
    RadialPoint,
    apply_initial_data,
    btbm_ft,
    btbm_subordination_kernel,
    lks_kernel,
    lks_kernel_ft,
    tf_kernel,
    tf_kernel_ft,
)
from lkspide.specfun import gamma_fn, mills_ratio


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams.lks(-1.0, 0.0, 1)
        with pytest.raises(ValueError):
            ModelParams.tf(0.7, 1)
        with pytest.raises(ValueError):
            ModelParams.tf(0.5, 4)
        with pytest.raises(ValueError):
            ModelParams(family="x", dim=1)

    def test_dyadic_flag(self):
        assert ModelParams.tf(0.5, 1).beta_is_dyadic
        assert ModelParams.tf(0.25, 1).beta_is_dyadic
        assert not ModelParams.tf(0.3, 1).beta_is_dyadic

    def test_radial_point(self):
        RadialPoint(1.0, 0.0)
        with pytest.raises(ValueError):
            RadialPoint(-0.1, 0.0)


class TestLksFT:
    def test_xi_zero(self):
        p = ModelParams.lks(2.0, 1.5, 1)
        t = 0.7
        expected = (2 * np.pi) ** -0.5 * np.exp(-2.0 * t * 1.5**2 / 2.0)
        assert lks_kernel_ft(p, t, 0.0) == pytest.approx(expected, rel=1e-14)

    def test_theta_zero_maximum(self):
        p = ModelParams.lks(1.0, 0.0, 2)
        assert lks_kernel_ft(p, 3.0, 0.0) == pytest.approx((2 * np.pi) ** -1.0, rel=1e-14)

    def test_eps8_point(self):
        p = ModelParams.lks(8.0, 0.0, 1)
        assert lks_kernel_ft(p, 1.0, 1.0) == pytest.approx(
            (2 * np.pi) ** -0.5 * np.exp(-1.0), rel=1e-14)

    def test_max_on_ridge(self):
        p = ModelParams.lks(1.0, 2.0, 1)
        xi = np.linspace(0, 5, 501)
        v = lks_kernel_ft(p, 1.0, xi)
        assert abs(xi[np.argmax(v)] - 2.0) < 0.02  # |xi|^2 = 2 theta = 4

    def test_monotone_in_t(self):
        p = ModelParams.lks(1.0, 0.0, 1)
        assert lks_kernel_ft(p, 2.0, 1.3) < lks_kernel_ft(p, 1.0, 1.3)


class TestLksKernel:
    def test_unit_mass_theta0(self):
        p = ModelParams.lks(3.0, 0.0, 1)
        t = 0.8
        mass, _ = quad(lambda r: lks_kernel(p, t, abs(r)), -25, 25, limit=300)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_center_value_quartic(self):
        # (1/2pi) int exp(-xi^4) dxi = Gamma(5/4)/pi for eps=8, t=1
        p = ModelParams.lks(8.0, 0.0, 1)
        assert lks_kernel(p, 1.0, 0.0) == pytest.approx(gamma_fn(1.25) / np.pi, rel=1e-9)

    def test_even_max_at_zero(self):
        p = ModelParams.lks(8.0, 0.0, 1)
        vals = [lks_kernel(p, 1.0, r) for r in (0.0, 0.4, 0.9, 1.5)]
        assert vals[0] == max(vals)

    def test_unit_mass_d2(self):
        p = ModelParams.lks(8.0, 0.0, 2)
        mass, _ = quad(lambda r: 2 * np.pi * r * lks_kernel(p, 1.0, r), 0, 20, limit=300)
        assert mass == pytest.approx(1.0, abs=1e-6)

    def test_parseval_spot_d3(self):
        # reconstruct the FT from real-space values on a radial grid
        p = ModelParams.lks(8.0, 0.0, 3)
        t, xi = 1.0, 1.2
        f = lambda r: 4 * np.pi * r * np.sin(xi * r) / xi * lks_kernel(p, t, r)
        got, _ = quad(f, 0, 15, limit=400)
        want = (2 * np.pi) ** 1.5 * lks_kernel_ft(p, t, xi)
        assert got == pytest.approx(want, rel=1e-6)


class TestBtbmFT:
    def test_xi_zero(self):
        for d in (1, 2, 3):
            assert btbm_ft(1.0, 0.0, d) == pytest.approx((2 * np.pi) ** (-d / 2), rel=1e-14)

    def test_large_xi_mills_asymptote(self):
        t, d = 1.7, 1
        for xi in (20.0, 60.0):
            v = btbm_ft(t, xi, d)
            ratio = v * np.sqrt(np.pi) * np.sqrt(t) * xi**2 / 2.0 * (2 * np.pi) ** (d / 2)
            assert ratio == pytest.approx(1.0, abs=2.0 / (t * xi**4))

    def test_matches_tf_half_everywhere(self):
        ts = np.linspace(0.1, 2.0, 12)
        xis = np.linspace(0.0, 10.0, 15)
        for d in (1, 2, 3):
            p = ModelParams.tf(0.5, d)
            for t in ts:
                a = tf_kernel_ft(p, t, xis)
                b = btbm_ft(t, xis, d)
                assert np.max(np.abs(a / b - 1)) < 1e-8

    def test_no_overflow_large_argument(self):
        v = btbm_ft(1.0, 300.0, 1)  # t |xi|^4 ~ 8e9: naive product overflows
        assert np.isfinite(v) and v > 0

    def test_standard_variant(self):
        t, xi = 0.9, 1.4
        v = btbm_ft(t, xi, 1, standard=True)
        want = (2 * np.pi) ** -0.5 * erfcx(np.sqrt(2 * t) * xi**2 / 4.0)
        assert v == pytest.approx(want, rel=1e-13)


class TestTfKernel:
    def test_ft_bounds_and_monotonicity(self):
        p = ModelParams.tf(0.25, 1)
        xi = np.linspace(0.0, 30.0, 200)
        v = tf_kernel_ft(p, 1.0, xi)
        assert np.all(v > 0) and np.all(v <= (2 * np.pi) ** -0.5 + 1e-15)
        assert np.all(np.diff(v) < 0)

    def test_ft_quarter_inside_scaled_bounds(self):
        from lkspide.specfun import ml_bounds
        p = ModelParams.tf(0.25, 1)
        v = tf_kernel_ft(p, 1.0, 1.0) * np.sqrt(2 * np.pi)
        lo, up = ml_bounds(0.25, 0.5)
        assert lo <= v <= up

    def test_unit_mass_d1(self):
        p = ModelParams.tf(0.5, 1)
        for t in (0.5, 1.0):
            mass = 2 * quad(lambda r: tf_kernel(p, t, r), 0, 30, limit=400)[0]
            assert mass == pytest.approx(1.0, abs=2e-6)

    def test_subordination_match(self):
        p = ModelParams.tf(0.5, 1)
        for (t, r) in [(1.0, 0.0), (0.5, 0.7), (2.0, 1.5)]:
            a = tf_kernel(p, t, r)
            b = btbm_subordination_kernel(t, r, 1)
            assert a == pytest.approx(b, rel=1e-5)

    def test_second_moment_shrinks(self):
        # m2 = t^beta / Gamma(1+beta) in d = 1
        p = ModelParams.tf(0.5, 1)
        for t in (1.0, 0.1):
            m2 = 2 * quad(lambda r: r**2 * tf_kernel(p, t, r), 0, 40, limit=400)[0]
            assert m2 == pytest.approx(t**0.5 / gamma_fn(1.5), rel=1e-4)

    def test_singular_origin_rejected(self):
        p = ModelParams.tf(0.5, 3)
        with pytest.raises(ValueError):
            tf_kernel(p, 1.0, 0.0)

    def test_nonnegative(self):
        p = ModelParams.tf(0.25, 1)
        for r in np.linspace(0, 6, 13):
            assert tf_kernel(p, 1.0, r) > -1e-10


class TestApplyInitialData:
    def test_constant_preserved(self):
        p = ModelParams.lks(8.0, 0.0, 1)
        u0 = np.ones(256)
        out = apply_initial_data(p, 1.0, u0, spacing=0.1)
        assert np.max(np.abs(out - 1.0)) < 1e-8

    def test_spike_gives_kernel_profile(self):
        p = ModelParams.lks(8.0, 0.0, 1)
        n, dx = 2048, 0.02
        u0 = np.zeros(n)
        u0[n // 2] = 1.0 / dx  # approximate delta
        out = apply_initial_data(p, 1.0, u0, spacing=dx)
        for off in (0, 10, 40):
            want = lks_kernel(p, 1.0, off * dx)
            assert out[n // 2 + off] == pytest.approx(want, abs=3e-4)

    def test_small_time_identity(self):
        p = ModelParams.tf(0.5, 1)
        x = np.linspace(-10, 10, 512)
        u0 = np.exp(-(x**2))
        out = apply_initial_data(p, 1e-7, u0, spacing=x[1] - x[0])
        assert np.max(np.abs(out - u0)) < 1e-3

    def test_coarse_grid_warns(self):
        p = ModelParams.lks(8.0, 0.0, 1)
        with pytest.warns(RuntimeWarning):
            apply_initial_data(p, 1e-9, np.ones(32), spacing=1.0)

    def test_d2_constant(self):
        p = ModelParams.lks(8.0, 0.0, 2)
        out = apply_initial_data(p, 0.5, np.ones((64, 64)), spacing=0.2)
        assert np.max(np.abs(out - 1.0)) < 1e-8
