import numpy as np
import pytest
from scipy.integrate import quad

from lkspide.kernels import ModelParams
from lkspide.specfun import gamma_fn, mittag_leffler
from lkspide.spectral import (
    AsymptoteReport,
    SpectralDensity,
    eval_sd,
    fit_asymptote,
    one_minus_cos_integral,
    physical_temporal_sd,
    spatial_variogram,
    temporal_variogram,
    tf_temporal_constant,
)


def lks_t(d=1, eps=8.0, theta=0.0):
    return SpectralDensity("temporal", "base", ModelParams.lks(eps, theta, d))


def tf_t(beta, d=1, field="base"):
    return SpectralDensity("temporal", field, ModelParams.tf(beta, d))


class TestDescriptors:
    def test_gradient_needs_d1(self):
        with pytest.raises(ValueError):
            SpectralDensity("temporal", "gradient", ModelParams.lks(1.0, 0.0, 2))

    def test_spatial_needs_t(self):
        with pytest.raises(ValueError):
            SpectralDensity("spatial", "base", ModelParams.lks(1.0, 0.0, 1))


class TestEvalSd:
    def test_lks_temporal_closed_form_point(self):
        # (1/2pi) int dxi/(1+xi^8) = 1/(8 sin(pi/8)) for eps=8, theta=0, d=1
        v = eval_sd(lks_t(), 1.0)
        assert v == pytest.approx(1.0 / (8.0 * np.sin(np.pi / 8.0)), rel=1e-9)

    def test_lks_spatial_at_ridge(self):
        p = ModelParams.lks(2.0, 1.5, 2)
        sd = SpectralDensity("spatial", "base", p, t_fixed=0.7)
        v = eval_sd(sd, np.sqrt(3.0))
        assert v == pytest.approx(0.7 / (2 * np.pi) ** 2, rel=1e-12)

    def test_tf_spatial_origin(self):
        sd = SpectralDensity("spatial", "base", ModelParams.tf(0.25, 1), t_fixed=0.7)
        assert eval_sd(sd, 0.0) == pytest.approx(0.7 / (2 * np.pi), rel=1e-12)

    def test_tf_spatial_matches_direct_quadrature(self):
        for b in (0.125, 0.5):
            p = ModelParams.tf(b, 1)
            t = 1.3
            sd = SpectralDensity("spatial", "base", p, t_fixed=t)
            for xi in (0.5, 3.0, 40.0):
                A = 0.5 * xi**2 * t**b
                pts = sorted({min(1.0, A ** (-1.0 / b) * 10.0**k) for k in range(14)} - {1.0})
                ref = t * quad(
                    lambda u: mittag_leffler(b, -A * u**b) ** 2, 0, 1,
                    points=[q for q in pts if 0 < q < 1], limit=800, epsrel=1e-11,
                )[0] / (2 * np.pi)
                assert eval_sd(sd, xi) == pytest.approx(ref, rel=1e-9)

    def test_positive_and_eventually_decreasing(self):
        for sd in (lks_t(2, theta=1.0),
                   SpectralDensity("spatial", "base", ModelParams.tf(0.5, 2), t_fixed=1.0)):
            f = np.logspace(0.6, 5, 60)
            v = eval_sd(sd, f)
            assert np.all(v > 0)
            assert np.all(np.diff(v) < 0)

    def test_gradient_is_freq_squared_times_base(self):
        f = np.logspace(-2, 3, 30)
        base = eval_sd(tf_t(0.25), f)
        grad = eval_sd(tf_t(0.25, field="gradient"), f)
        assert np.allclose(grad, f**2 * base, rtol=1e-13)

    def test_temporal_requires_positive_freq(self):
        with pytest.raises(ValueError):
            eval_sd(lks_t(), 0.0)

    def test_tf_temporal_separable_formula(self):
        b, d = 0.25, 3
        c = tf_temporal_constant(b, d)
        ref = quad(
            lambda r: 4 * np.pi * r**2 / (1 + r**2 * np.cos(np.pi * b / 2) + r**4 / 4),
            0, np.inf, limit=400,
        )[0]
        assert c == pytest.approx(ref, rel=1e-8)
        tau = 7.3
        v = eval_sd(SpectralDensity("temporal", "base", ModelParams.tf(b, d)), tau)
        assert v == pytest.approx((2 * np.pi) ** -d * c * tau ** -(2 - b * d / 2), rel=1e-10)


class TestOneMinusCos:
    @pytest.mark.parametrize("alpha", [1.25, 1.5, 1.9, 2.0, 2.1, 2.5, 2.9])
    def test_against_quadrature(self, alpha):
        head = quad(lambda u: (1 - np.cos(u)) / u**alpha, 0, 50, limit=2000)[0]
        # tail: int_50^inf u^-a du - oscillatory remainder (negligible bound)
        tail = 50.0 ** (1 - alpha) / (alpha - 1)
        osc = quad(lambda u: u**-alpha, 50, np.inf, weight="cos", wvar=1.0, limit=200)[0]
        assert one_minus_cos_integral(alpha) == pytest.approx(head + tail - osc, rel=1e-6)

    def test_classical_values(self):
        assert one_minus_cos_integral(2.0) == pytest.approx(np.pi / 2, rel=1e-9)
        assert one_minus_cos_integral(1.5) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-12)


class TestTemporalVariogram:
    def test_tf_exact_power_law(self):
        sd = tf_t(0.5, 2)
        h = np.logspace(-4, -1, 10)
        v = temporal_variogram(sd, h)
        slope = np.polyfit(np.log(h), np.log(v), 1)[0]
        assert slope == pytest.approx((2 - 0.5 * 2) / 2, abs=1e-12)

    def test_lks_scaling_theta0(self):
        for d in (1, 2, 3):
            sd = lks_t(d)
            h = np.logspace(-4, -1, 8)
            v = temporal_variogram(sd, h)
            slope = np.polyfit(np.log(h), np.log(v), 1)[0]
            assert slope == pytest.approx((4 - d) / 4, abs=1e-9)

    def test_lks_xi_route_equals_tau_route(self):
        # dual route: closed-in-time radial integral vs 2 int (1-cos) D/(2pi)
        sd = lks_t(1, eps=8.0, theta=0.0)
        h = 0.2
        v1 = temporal_variogram(sd, h)
        f = lambda tau: (1 - np.cos(h * tau)) * physical_temporal_sd(sd, tau)
        a1 = quad(f, 0, 1e3, limit=2000)[0]
        a2 = quad(f, 1e3, 1e5, limit=2000)[0]
        Ct = physical_temporal_sd(sd, 1e5) * (1e5) ** 1.75
        a3 = Ct * (1e5) ** -0.75 / 0.75
        assert v1 == pytest.approx(4 * (a1 + a2 + a3), rel=1e-5)

    def test_kernel_space_double_integral_oracle(self):
        # brute Parseval in kernel space pins the 1/(2 pi) convention
        from scipy.special import erfcx
        t, s = 1.0, 0.8
        def xi_int(r):
            if r >= s:
                f = lambda x: erfcx(x**2 / 2 * (t - r) ** 0.5) ** 2
            else:
                f = lambda x: (erfcx(x**2 / 2 * (t - r) ** 0.5)
                               - erfcx(x**2 / 2 * (s - r) ** 0.5)) ** 2
            return 2 * quad(f, 0, np.inf, limit=300)[0] / (2 * np.pi)
        head = quad(xi_int, -40, t, limit=400, points=[s])[0]
        tail = quad(lambda u: xi_int(-u), 40, np.inf, limit=200)[0]
        v = temporal_variogram(tf_t(0.5), t - s)
        assert v == pytest.approx(head + tail, rel=1e-6)

    def test_small_lag_monotone_to_zero(self):
        sd = lks_t(1, theta=1.0)
        h = np.array([1e-1, 1e-2, 1e-3, 1e-4])
        v = temporal_variogram(sd, h)
        assert np.all(np.diff(v) < 0) and v[-1] < 1e-3

    def test_gradient_exponents(self):
        h = np.logspace(-4, -2, 8)
        v = temporal_variogram(tf_t(0.5, field="gradient"), h)
        assert np.polyfit(np.log(h), np.log(v), 1)[0] == pytest.approx(0.25, abs=1e-10)
        vg = temporal_variogram(SpectralDensity(
            "temporal", "gradient", ModelParams.lks(8.0, 0.0, 1)), h)
        assert np.polyfit(np.log(h), np.log(vg), 1)[0] == pytest.approx(0.25, abs=1e-6)


class TestSpatialVariogram:
    def test_zero_at_zero_and_even_input_guard(self):
        sd = SpectralDensity("spatial", "base", ModelParams.lks(8.0, 1.0, 1), t_fixed=1.0)
        assert spatial_variogram(sd, 0.0) == 0.0
        with pytest.raises(ValueError):
            spatial_variogram(sd, -0.5)

    def test_gradient_linear_small_h(self):
        sd = SpectralDensity("spatial", "gradient", ModelParams.lks(8.0, 0.0, 1), t_fixed=1.0)
        h = np.logspace(-4, -2, 7)
        v = spatial_variogram(sd, h)
        assert np.polyfit(np.log(h), np.log(v), 1)[0] == pytest.approx(1.0, abs=0.01)

    def test_tf_half_gradient_log_law(self):
        sd = SpectralDensity("spatial", "gradient", ModelParams.tf(0.5, 1), t_fixed=1.0)
        h = np.logspace(-5, -2, 8)
        v = spatial_variogram(sd, h)
        A = np.column_stack([np.ones_like(h), np.log(np.log(1 / h))])
        p = np.linalg.lstsq(A, np.log(v) - np.log(h), rcond=None)[0][1]
        assert p == pytest.approx(1.0, abs=0.1)

    def test_variance_consistency_d1(self):
        # spatial_cov(0) equals the integrated density
        from lkspide.covariance import spatial_cov
        sd = SpectralDensity("spatial", "base", ModelParams.lks(8.0, 1.0, 1), t_fixed=1.0)
        c0 = spatial_cov(sd, 0.0)
        direct = 2 * quad(lambda x: float(eval_sd(sd, x)), 0, np.inf, limit=400)[0]
        assert c0 == pytest.approx(direct, rel=1e-8)


class TestFitAsymptote:
    def test_window_validation(self):
        with pytest.raises(ValueError):
            fit_asymptote(lks_t(), (1.0, 1e5))
        with pytest.raises(ValueError):
            fit_asymptote(lks_t(), (1e2, 1e5), n_points=10)

    def test_lks_temporal_constant_theta0(self):
        # exact separable case: constant = (2pi)^-d int dxi/(1 + |xi|^8)
        sd = lks_t(1)
        rep = fit_asymptote(sd, (1e3, 1e7))
        want = quad(lambda x: 2.0 / (1 + x**8), 0, np.inf)[0] / (2 * np.pi)
        assert rep.fitted_exponent == pytest.approx(-1.75, abs=1e-6)
        assert rep.fitted_constant == pytest.approx(want, rel=1e-4)

    def test_criticality_split(self):
        for b, lo_hi in [(0.25, "low"), (0.5, "high")]:
            sd = SpectralDensity("spatial", "base", ModelParams.tf(b, 1), t_fixed=1.0)
            rep = fit_asymptote(sd, (1e3, 1e7), include_log_power=True)
            if lo_hi == "low":
                assert rep.fitted_log_power < 0.15
            else:
                assert rep.fitted_log_power > 0.85

    def test_auto_log_power_only_at_half(self):
        sd = SpectralDensity("spatial", "base", ModelParams.tf(0.25, 1), t_fixed=1.0)
        rep = fit_asymptote(sd, (1e3, 1e6))
        assert rep.fitted_log_power == 0.0
        sd2 = SpectralDensity("spatial", "base", ModelParams.tf(0.5, 1), t_fixed=1.0)
        rep2 = fit_asymptote(sd2, (1e3, 1e6))
        assert rep2.fitted_log_power != 0.0
