"""Scalar primitives: frozen high-precision values, stability in the
tails, and random-stream determinism."""

import numpy as np
import pytest

from cetime.mathstats import (
    Rng,
    log_sigmoid,
    sample_logistic,
    sigmoid,
    std_normal_cdf,
    std_normal_log_pdf,
    std_normal_log_survival,
)

# frozen from a 40-digit mpmath evaluation of the closed forms
LOG_PDF_3 = -5.4189385332046727
CDF_1 = 0.8413447460685429
LOG_SF_10 = -53.23128515051247
SIGMOID_2 = 0.8807970779778824


class TestNormalFunctions:
    def test_log_pdf_values(self):
        assert std_normal_log_pdf(0.0) == pytest.approx(-0.9189385332046727, abs=1e-15)
        assert std_normal_log_pdf(1.0) == pytest.approx(-1.4189385332046727, abs=1e-15)
        assert std_normal_log_pdf(3.0) == pytest.approx(LOG_PDF_3, abs=1e-12)

    def test_cdf_values(self):
        assert std_normal_cdf(0.0) == 0.5
        assert std_normal_cdf(1.0) == pytest.approx(CDF_1, abs=1e-15)
        assert std_normal_cdf(38.0) == pytest.approx(1.0, abs=1e-15)
        assert std_normal_cdf(-38.0) == pytest.approx(0.0, abs=1e-15)

    def test_log_survival_values(self):
        assert std_normal_log_survival(0.0) == pytest.approx(np.log(0.5), abs=1e-15)
        assert abs(std_normal_log_survival(-38.0)) < 1e-15
        assert std_normal_log_survival(10.0) == pytest.approx(LOG_SF_10, rel=1e-13)

    def test_log_survival_far_tail_finite(self):
        # naive log(1 - Phi) dies around z = 8; the log-domain branch must not
        for z in (20.0, 50.0, 200.0):
            v = std_normal_log_survival(z)
            assert np.isfinite(v) and v < -190.0 or z < 25

    def test_complement_identity(self):
        z = np.linspace(-8.0, 8.0, 1601)
        total = std_normal_cdf(z) + np.exp(std_normal_log_survival(z))
        np.testing.assert_allclose(total, 1.0, atol=1e-12)

    def test_monotonicity(self):
        z = np.linspace(-12.0, 12.0, 4001)
        assert np.all(np.diff(std_normal_cdf(z)) >= 0.0)
        assert np.all(np.diff(std_normal_log_survival(z)) <= 0.0)

    def test_domain_errors(self):
        for fn in (std_normal_log_pdf, std_normal_cdf, std_normal_log_survival):
            with pytest.raises(ValueError):
                fn(np.nan)
            with pytest.raises(ValueError):
                fn(np.inf)


class TestSigmoids:
    def test_values(self):
        assert sigmoid(0.0) == 0.5
        assert sigmoid(2.0) == pytest.approx(SIGMOID_2, abs=1e-15)
        assert log_sigmoid(0.0) == pytest.approx(np.log(0.5), abs=1e-15)
        assert log_sigmoid(-100.0) == pytest.approx(-100.0, abs=1e-9)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(-30, 30, size=10000)
        np.testing.assert_allclose(sigmoid(a) + sigmoid(-a), 1.0, atol=1e-15)

    def test_log_sigmoid_matches_log_of_sigmoid(self):
        a = np.linspace(-30, 30, 1001)
        np.testing.assert_allclose(log_sigmoid(a), np.log(sigmoid(a)), atol=1e-12)


class TestLogisticNoise:
    def test_transform_value(self):
        # the sampler applies log(u) - log(1 - u); at u = 0.9 that is ln 9
        assert np.log(0.9) - np.log1p(-0.9) == pytest.approx(2.1972245773362196, abs=1e-12)

    def test_empirical_mean_zero(self):
        draws = sample_logistic(Rng(123), 1_000_000)
        assert np.all(np.isfinite(draws))
        # logistic variance pi^2/3 -> standard error ~0.0018
        assert abs(draws.mean()) < 0.01

    def test_empirical_variance(self):
        draws = sample_logistic(Rng(7), 500_000)
        assert draws.var() == pytest.approx(np.pi**2 / 3.0, rel=0.02)


class TestRng:
    def test_equal_seeds_equal_streams(self):
        a = Rng(2024).uniform_open(10_000)
        b = Rng(2024).uniform_open(10_000)
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(Rng(1).uniform_open(100), Rng(2).uniform_open(100))

    def test_child_streams_independent_of_sibling_order(self):
        parent = Rng(5)
        c3_first = parent.child(3).uniform_open(100)
        other = Rng(5)
        other.child(1).uniform_open(50)  # touching one child must not move another
        np.testing.assert_array_equal(c3_first, other.child(3).uniform_open(100))

    def test_child_streams_distinct(self):
        parent = Rng(5)
        assert not np.array_equal(parent.child(0).uniform_open(100), parent.child(1).uniform_open(100))

    def test_uniform_open_interval(self):
        u = Rng(0).uniform_open(1_000_000)
        assert u.min() > 0.0
        assert u.max() < 1.0

    def test_normal_determinism(self):
        np.testing.assert_array_equal(Rng(9).standard_normal(1000), Rng(9).standard_normal(1000))
