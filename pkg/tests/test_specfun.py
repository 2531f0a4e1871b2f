import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfcx, hyp2f1 as scipy_hyp2f1

from lkspide.specfun import (
    MLEvalPolicy,
    gamma_fn,
    hyp2F1,
    mills_ratio,
    mittag_leffler,
    ml_bounds,
)

mpmath = pytest.importorskip("mpmath")
mpmath.mp.dps = 40


def ml_talbot(beta, x):
    """Independent oracle: Talbot inversion of the Laplace transform
    theta^(b-1)/(theta^b + x) of t -> E_b(-x t^b), evaluated at t = 1."""
    f = lambda th: th ** (mpmath.mpf(beta) - 1) / (th ** mpmath.mpf(beta) + x)
    return float(mpmath.invertlaplace(f, 1.0, method="talbot"))


class TestGamma:
    def test_classical_values(self):
        assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma_fn(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-14)
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_accuracy_against_mpmath(self):
        xs = np.concatenate([np.linspace(-169.5, -0.5, 40) + 0.25, np.linspace(0.1, 170, 40)])
        for x in xs:
            ref = float(mpmath.gamma(x))
            assert gamma_fn(x) == pytest.approx(ref, rel=1e-13)

    def test_pole_rejected(self):
        for x in (0.0, -1.0, -7.0):
            with pytest.raises(ValueError):
                gamma_fn(x)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            gamma_fn(np.inf)


class TestMLBounds:
    def test_frozen_endpoints(self):
        # 1/(1 + 2 sqrt(pi)) and 1/(1 + 2/Gamma(3/2))
        lo, up = ml_bounds(0.5, 2.0)
        assert lo == pytest.approx(0.22002647041688548, rel=1e-12)
        assert up == pytest.approx(0.30705379318493364, rel=1e-12)

    def test_beta_quarter_form(self):
        lo, up = ml_bounds(0.25, 1.0)
        assert lo == pytest.approx(1.0 / (1.0 + gamma_fn(0.75)), rel=1e-13)
        assert up == pytest.approx(1.0 / (1.0 + 1.0 / gamma_fn(1.25)), rel=1e-13)

    def test_limits_at_zero(self):
        lo, up = ml_bounds(0.3, 1e-12)
        assert lo == pytest.approx(1.0, abs=1e-10)
        assert up == pytest.approx(1.0, abs=1e-10)

    def test_ordering_everywhere(self):
        x = np.logspace(-6, 6, 50)
        for b in np.linspace(0.05, 0.95, 10):
            lo, up = ml_bounds(b, x)
            assert np.all(lo <= up)
            assert np.all((lo > 0) & (up < 1 + 1e-15))

    def test_domain(self):
        with pytest.raises(ValueError):
            ml_bounds(1.0, 1.0)
        with pytest.raises(ValueError):
            ml_bounds(0.5, -1.0)


class TestMittagLeffler:
    def test_trivial_examples(self):
        assert mittag_leffler(0.5, 0.0) == 1.0
        assert mittag_leffler(1.0, -1.0) == pytest.approx(np.exp(-1.0), rel=1e-13)

    def test_half_equals_erfcx(self):
        # E_{1/2}(-x) = exp(x^2) erfc(x); the evaluator never calls erfcx
        xs = np.logspace(-6, 6, 300)
        rel = np.abs(mittag_leffler(0.5, -xs) / erfcx(xs) - 1.0)
        assert rel.max() < 5e-12

    @pytest.mark.parametrize("beta", [0.1, 0.125, 0.25, 0.375, 0.45, 0.75])
    def test_against_talbot_oracle(self, beta):
        for x in np.logspace(-2, 2.2, 12):
            ref = ml_talbot(beta, x)
            assert mittag_leffler(beta, -x) == pytest.approx(ref, rel=5e-12)

    def test_bound_containment_logspaced_grid(self):
        x = np.logspace(-6, 6, 60)
        for b in (0.1, 0.2, 0.3, 0.4, 0.5):
            lo, up = ml_bounds(b, x)
            v = mittag_leffler(b, -x)
            assert np.all(v >= lo) and np.all(v <= up)

    def test_asymptotic_constant(self):
        # E_b(-x) ~ 1/(Gamma(1-b) x); the product with Gamma(1-b) x tends to 1
        x = np.logspace(3.01, 6, 25)
        for b in np.arange(0.1, 0.95, 0.1):
            dev = np.abs(mittag_leffler(b, -x) * x * gamma_fn(1.0 - b) - 1.0)
            assert dev.max() < 0.01

    def test_exp_identity_window(self):
        x = np.linspace(-30, 5, 120)
        assert np.max(np.abs(mittag_leffler(1.0, x) / np.exp(x) - 1.0)) < 1e-12

    def test_monotone_decreasing(self):
        x = np.linspace(0.0, 60.0, 400)
        for b in (0.2, 0.5, 0.9):
            v = mittag_leffler(b, -x)
            assert np.all(np.diff(v) < 0)

    def test_large_x0_vs_erfcx_crosscheck(self):
        for x0 in (50.0, 200.0, 3000.0):
            assert mittag_leffler(0.5, -x0) == pytest.approx(erfcx(x0), rel=1e-8)

    def test_positive_arguments_series(self):
        # E_1/2(x) = exp(x^2) erfc(-x) for x > 0
        for x in (0.5, 2.0, 4.0):
            ref = float(mpmath.exp(x**2) * mpmath.erfc(-x))
            assert mittag_leffler(0.5, x) == pytest.approx(ref, rel=1e-11)

    def test_positive_overflow_guard(self):
        with pytest.raises(OverflowError):
            mittag_leffler(0.5, 40.0)

    def test_beta_domain(self):
        with pytest.raises(ValueError):
            mittag_leffler(0.0, -1.0)
        with pytest.raises(ValueError):
            mittag_leffler(1.2, -1.0)

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            MLEvalPolicy(series_cutoff=60.0, asymptotic_cutoff=50.0)
        with pytest.raises(ValueError):
            MLEvalPolicy(target_rel_tol=0.01)


class TestHyp2F1:
    def test_terminating_and_z0(self):
        assert hyp2F1(1.0, 0.0, 2.0, 0.5) == 1.0
        assert hyp2F1(0.7, -1.3, 2.2, 0.0) == 1.0

    def test_log_closed_form(self):
        # 2F1(1,1;2;z) = -log(1-z)/z
        z = 0.5
        assert hyp2F1(1.0, 1.0, 2.0, z) == pytest.approx(-np.log(1 - z) / z, rel=1e-10)

    def test_against_scipy(self):
        rng = np.random.default_rng(0)
        for _ in range(40):
            a, b = rng.uniform(-2, 3, 2)
            c = rng.uniform(0.3, 4.0)
            z = rng.uniform(-0.8, 0.8)
            assert hyp2F1(a, b, c, z) == pytest.approx(scipy_hyp2f1(a, b, c, z), rel=2e-9)

    def test_symmetry_in_ab(self):
        for a, b, c, z in [(0.3, 1.7, 2.4, 0.6), (-0.5, 2.0, 1.1, -0.4)]:
            assert hyp2F1(a, b, c, z) == hyp2F1(b, a, c, z)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            hyp2F1(1.0, 1.0, 0.0, 0.5)
        with pytest.raises(ValueError):
            hyp2F1(1.0, 1.0, -3.0, 0.5)
        with pytest.raises(ValueError):
            hyp2F1(1.0, 1.0, 2.0, 1.0)


class TestMillsRatio:
    def test_quadrature_oracle(self):
        for x in (0.3, 1.0, 10.0):
            tail, _ = quad(lambda u: np.exp(-u * u / 2.0), x, np.inf, epsabs=1e-14)
            ref = tail / np.exp(-x * x / 2.0)
            assert mills_ratio(x) == pytest.approx(ref, rel=1e-10)

    def test_frozen_values(self):
        assert mills_ratio(1.0) == pytest.approx(0.6556795424187985, rel=1e-9)
        assert mills_ratio(10.0) == pytest.approx(0.09903090902207367, abs=1e-5)

    def test_inverse_x_asymptote(self):
        x = np.logspace(2, 6, 20)
        assert np.max(np.abs(mills_ratio(x) * x - 1.0)) < 1e-4

    def test_domain(self):
        with pytest.raises(ValueError):
            mills_ratio(0.0)
