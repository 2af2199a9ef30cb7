"""Tests for the ratio-of-uniforms engine and the joint posterior sampler.

Tests cover:
  1. Bounding rectangle on a known density (standard normal)
  2. Exactness of 1-D draws against a known CDF
  3. Gamma variates for shape above and below one
  4. sample_posterior: reproducibility, propriety gate, quadrature oracle
  5. Exactness against known and quadrature CDFs, independence of the draws

Run:
    python -m pytest tests/test_rou_sampler.py -v
    python -m pytest tests/test_rou_sampler.py -v -m "not slow"
"""

from __future__ import annotations

import math

import numpy as np
import pytest


# ── Test helpers ─────────────────────────────────────────────────────────────

def _std_normal(x):
    return -0.5 * np.asarray(x, dtype=float) ** 2


def _bearings():
    from harness.data_feed import load_dataset

    return load_dataset("bearings")


# sup x·e^{−x²/4} at x = √2
NORMAL_B_PLUS_R1 = math.sqrt(2.0) * math.exp(-0.5)


# ═════════════════════════════════════════════════════════════════════════════
# 1. Bounds
# ═════════════════════════════════════════════════════════════════════════════

class TestRouBounds:

    def test_standard_normal_r1(self):
        from services.rou_sampler import rou_bounds

        b = rou_bounds(_std_normal, 1.0, (-40.0, 40.0))
        assert b.a_bound == 1.0
        assert b.log_shift == pytest.approx(0.0, abs=1e-12)
        assert b.b_plus == pytest.approx(NORMAL_B_PLUS_R1, rel=1e-6)
        assert b.b_minus == pytest.approx(-NORMAL_B_PLUS_R1, rel=1e-6)
        assert b.b_plus >= NORMAL_B_PLUS_R1

    def test_shifted_density_uses_mode_centre(self):
        from services.rou_sampler import rou_bounds

        b = rou_bounds(lambda x: -0.5 * (np.asarray(x) - 3.0) ** 2, 1.0, (-30.0, 30.0), center=None)
        assert b.mode == pytest.approx(3.0, abs=1e-6)
        assert b.center == b.mode
        assert b.b_minus < 0 < b.b_plus

    def test_r0_unbounded_on_edge(self):
        from models.errors import BracketError
        from services.rou_sampler import rou_bounds

        # r = 0 bounds x itself, so the supremum sits on the bracket edge
        with pytest.raises(BracketError):
            rou_bounds(_std_normal, 0.0, (-40.0, 40.0))

    def test_negative_r_rejected(self):
        from models.errors import DomainError
        from services.rou_sampler import rou_bounds

        with pytest.raises(DomainError):
            rou_bounds(_std_normal, -0.5, (-5.0, 5.0))

    def test_empty_support(self):
        from models.errors import EmptySupportError
        from services.rou_sampler import rou_bounds

        with pytest.raises(EmptySupportError):
            rou_bounds(lambda x: np.full(np.shape(x), -np.inf), 1.0, (-1.0, 1.0))

    def test_mode_on_edge(self):
        from models.errors import BracketError
        from services.rou_sampler import locate_mode

        with pytest.raises(BracketError):
            locate_mode(lambda x: np.asarray(x, dtype=float), (0.0, 1.0))


# ═════════════════════════════════════════════════════════════════════════════
# 2. 1-D sampling
# ═════════════════════════════════════════════════════════════════════════════

class TestRouSample1d:

    def test_standard_normal_is_exact(self):
        from scipy.stats import norm
        from services.diagnostics import ks_test
        from services.rou_sampler import rou_bounds, rou_sample_1d

        bounds = rou_bounds(_std_normal, 1.0, (-40.0, 40.0))
        draws, rate = rou_sample_1d(_std_normal, bounds, 100_000, np.random.default_rng(1))
        assert draws.shape == (100_000,)
        # 1% critical value of the K-S distance at n = 10⁵
        assert ks_test(draws, norm.cdf).statistic < 1.63 / math.sqrt(draws.size)
        # Acceptance = ∫f / ((r + 1)·a·(b⁺ − b⁻)) = √(2π) / (2·2b⁺)
        assert rate == pytest.approx(math.sqrt(2 * math.pi) / (4 * NORMAL_B_PLUS_R1), abs=0.01)

    def test_exactly_m_draws(self):
        from services.rou_sampler import rou_bounds, rou_sample_1d

        bounds = rou_bounds(_std_normal, 0.5, (-40.0, 40.0))
        for m in (1, 7, 1000):
            draws, rate = rou_sample_1d(_std_normal, bounds, m, np.random.default_rng(m))
            assert draws.size == m
            assert 0 < rate <= 1

    def test_low_acceptance_raises(self):
        from models.errors import SamplerEfficiencyError
        from services.rou_sampler import RouBounds, rou_sample_1d

        # A far too generous rectangle around a narrow spike
        spike = lambda x: -0.5 * (np.asarray(x, dtype=float) / 1e-4) ** 2  # noqa: E731
        bounds = RouBounds(r=1.0, a_bound=1.0, b_minus=-1e4, b_plus=1e4, log_shift=0.0)
        with pytest.raises(SamplerEfficiencyError):
            rou_sample_1d(spike, bounds, 10, np.random.default_rng(0), max_proposals=50_000, min_acceptance=1e-3)

    def test_m_must_be_positive(self):
        from models.errors import DomainError
        from services.rou_sampler import rou_bounds, rou_sample_1d

        bounds = rou_bounds(_std_normal, 1.0, (-40.0, 40.0))
        with pytest.raises(DomainError):
            rou_sample_1d(_std_normal, bounds, 0, np.random.default_rng(0))


# ═════════════════════════════════════════════════════════════════════════════
# 3. Gamma variates
# ═════════════════════════════════════════════════════════════════════════════

class TestGammaVariates:

    @pytest.mark.parametrize("shape,rate", [(3.0, 1.5), (0.5, 2.0), (23.0, 4.4)])
    def test_mean_and_variance(self, shape, rate):
        from services.rou_sampler import gamma_variates

        g = gamma_variates(shape, np.full(200_000, rate), np.random.default_rng(5))
        assert np.all(g > 0)
        assert g.mean() == pytest.approx(shape / rate, rel=0.015)
        assert g.var() == pytest.approx(shape / rate**2, rel=0.03)

    def test_single_variate(self):
        from services.rou_sampler import gamma_variate

        assert gamma_variate(2.0, 1.0, np.random.default_rng(0)) > 0

    def test_invalid_arguments(self):
        from models.errors import DomainError
        from services.rou_sampler import gamma_variates

        rng = np.random.default_rng(0)
        with pytest.raises(DomainError):
            gamma_variates(0.0, [1.0], rng)
        with pytest.raises(DomainError):
            gamma_variates(1.0, [0.0], rng)


# ═════════════════════════════════════════════════════════════════════════════
# 4. Joint posterior sampler
# ═════════════════════════════════════════════════════════════════════════════

class TestSamplePosterior:

    def test_shape_and_metadata(self):
        from models.params import PriorSpec
        from services.rou_sampler import sample_posterior

        s = sample_posterior(_bearings(), PriorSpec(), r=1.0, m=2000, seed=42)
        assert len(s) == 2000
        assert s.alphas.shape == s.lambdas.shape == (2000,)
        assert np.all(s.alphas > 0) and np.all(s.lambdas > 0)
        assert 0.3 < s.acceptance_rate <= 1.0
        assert s.seed == 42
        assert s.bounds.b_minus <= 0 <= s.bounds.b_plus

    def test_same_seed_identical(self):
        from models.params import PriorSpec
        from services.rou_sampler import sample_posterior

        a = sample_posterior(_bearings(), PriorSpec(), m=500, seed=9)
        b = sample_posterior(_bearings(), PriorSpec(), m=500, seed=9)
        assert np.array_equal(a.alphas, b.alphas)
        assert np.array_equal(a.lambdas, b.lambdas)

    def test_improper_prior_refused(self):
        from models.errors import ImproperPosteriorError
        from models.params import PriorSpec
        from services.rou_sampler import sample_posterior

        with pytest.raises(ImproperPosteriorError, match="b ≤ 1 violated"):
            sample_posterior(_bearings(), PriorSpec(a=1, b=2), m=10, seed=0)

    def test_point_estimates_and_summary(self):
        from models.params import PriorSpec
        from services.rou_sampler import sample_posterior

        s = sample_posterior(_bearings(), PriorSpec(), m=4000, seed=3)
        med = s.point_estimate("median")
        mean = s.point_estimate("mean")
        summary = s.summary()
        assert med == (summary["alpha"]["median"], summary["lambda"]["median"])
        assert mean == (summary["alpha"]["mean"], summary["lambda"]["mean"])
        assert summary["lambda"]["q025"] < med[1] < summary["lambda"]["q975"]
        with pytest.raises(ValueError):
            s.point_estimate("mode")
        assert list(s.to_frame().columns) == ["alpha", "lambda"]

    def test_scale_equivariance(self):
        from models.params import PriorSpec
        from services.rou_sampler import sample_posterior

        data = _bearings()
        a = sample_posterior(data, PriorSpec(), m=3000, seed=17)
        b = sample_posterior(data.scaled(10.0), PriorSpec(), m=3000, seed=18)
        # λ scales as 1/c, α is unchanged
        se = 4 * np.std(a.lambdas) / math.sqrt(3000)
        assert np.mean(b.lambdas) * 10.0 == pytest.approx(np.mean(a.lambdas), abs=2 * se)

    @pytest.mark.slow
    def test_matches_quadrature_oracle(self):
        from models.params import Dataset, GEParams, PriorSpec
        from services.ge_dist import ge_sample
        from services.posterior import quadrature_posterior_summary
        from services.rou_sampler import sample_posterior

        rng = np.random.default_rng(77)
        cases = [(5, 1.5, 1.0), (5, 0.7, 2.0), (10, 2.0, 0.5), (10, 1.0, 1.0), (23, 3.0, 0.1)]
        for k, (n, alpha, lam) in enumerate(cases):
            data = Dataset(ge_sample(GEParams(alpha=alpha, lam=lam), n, rng))
            q = quadrature_posterior_summary(data, PriorSpec())
            s = sample_posterior(data, PriorSpec(), m=10_000, seed=100 + k)
            mc_se = np.std(s.lambdas, ddof=1) / math.sqrt(len(s))
            assert abs(np.mean(s.lambdas) - q.mean_lambda) < 3.5 * mc_se, (n, alpha, lam)
            alpha_se = np.std(s.alphas, ddof=1) / math.sqrt(len(s))
            assert abs(np.mean(s.alphas) - q.mean_alpha) < 3.5 * alpha_se, (n, alpha, lam)

    @pytest.mark.slow
    def test_bearings_bayes_estimates(self):
        from models.params import GEParams, PriorSpec
        from services.diagnostics import ks_test
        from services.ge_dist import ge_cdf
        from services.rou_sampler import sample_posterior

        data = _bearings()
        alphas, lambdas, ds = [], [], []
        for seed in range(10):
            s = sample_posterior(data, PriorSpec(), r=1.0, m=10_000, seed=seed)
            a_hat, l_hat = s.point_estimate("median")
            alphas.append(a_hat)
            lambdas.append(l_hat)
            p = GEParams(alpha=a_hat, lam=l_hat)
            ds.append(ks_test(data, lambda x, p=p: ge_cdf(x, p)).statistic)
        assert all(abs(a - 5.02) < 0.15 for a in alphas)
        assert all(abs(l - 0.0317) < 0.002 for l in lambdas)
        assert all(abs(d - 0.1043) < 0.003 for d in ds)


# ═════════════════════════════════════════════════════════════════════════════
# 5. Exactness and independence of the draws
# ═════════════════════════════════════════════════════════════════════════════

def _gamma3(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 2.0 * np.log(x) - x
    return np.where(x > 0, out, -np.inf)


def _z_posterior_cdf(data, prior, bracket, points=40_001):
    """CDF of z = ln λ by cumulative trapezoid on a fine grid over ``bracket``."""
    from scipy.integrate import cumulative_trapezoid
    from services.posterior import log_marginal_z

    z = np.linspace(bracket[0], bracket[1], points)
    logp = np.asarray(log_marginal_z(z, data, prior))
    cum = cumulative_trapezoid(np.exp(logp - logp.max()), z, initial=0.0)
    cum /= cum[-1]
    return lambda t: np.interp(t, z, cum)


class TestExactness:

    def test_gamma3_kernel(self):
        from scipy.stats import gamma
        from services.diagnostics import ks_test
        from services.rou_sampler import rou_bounds, rou_sample_1d

        bounds = rou_bounds(_gamma3, 1.0, (0.0, 80.0), center=None)
        assert bounds.mode == pytest.approx(2.0, abs=1e-6)
        draws, _ = rou_sample_1d(_gamma3, bounds, 100_000, np.random.default_rng(3))
        assert np.all(draws > 0)
        assert ks_test(draws, gamma(3.0).cdf).statistic < 1.63 / math.sqrt(draws.size)

    @pytest.mark.slow
    def test_z_posterior_of_small_dataset(self):
        from models.params import Dataset, PriorSpec
        from services.diagnostics import ks_test
        from services.rou_sampler import auto_bracket_z, sample_posterior

        data, prior = Dataset.from_values([0.5, 1.2, 2.0, 3.1, 0.8]), PriorSpec()
        s = sample_posterior(data, prior, r=1.0, m=100_000, seed=8)
        cdf = _z_posterior_cdf(data, prior, auto_bracket_z(data, prior))
        assert ks_test(np.log(s.lambdas), cdf).statistic < 1.63 / math.sqrt(len(s))

    def test_alpha_given_fixed_lambda(self):
        from models.params import PriorSpec
        from services.posterior import conditional_alpha_params, quadrature_posterior_summary
        from services.rou_sampler import gamma_variates

        data, prior = _bearings(), PriorSpec()
        lam = quadrature_posterior_summary(data, prior).median_lambda
        shape, rate = conditional_alpha_params(lam, data, prior)
        n = 100_000
        alphas = gamma_variates(shape, np.full(n, rate), np.random.default_rng(15))
        mean, var = shape / rate, shape / rate**2
        assert abs(alphas.mean() - mean) < 3.0 * math.sqrt(var / n)
        # sd of the sample variance for a Gamma: var·√(2/(n−1) + 6/(shape·n))
        var_sd = var * math.sqrt(2.0 / (n - 1) + 6.0 / (shape * n))
        assert abs(alphas.var(ddof=1) - var) < 3.0 * var_sd


class TestIndependence:

    def test_lambda_acf_in_white_noise_band(self):
        from models.params import PriorSpec
        from services.diagnostics import acf
        from services.rou_sampler import sample_posterior

        s = sample_posterior(_bearings(), PriorSpec(), r=1.0, m=10_000, seed=42)
        rho = acf(s.lambdas, 20)
        band = 2.0 / math.sqrt(len(s))
        assert int(np.count_nonzero(np.abs(rho[1:]) >= band)) <= 2

    @pytest.mark.slow
    def test_geweke_over_forty_seeds(self):
        from models.params import PriorSpec
        from services.diagnostics import geweke_z
        from services.rou_sampler import sample_posterior

        data = _bearings()
        passed = 0
        for seed in range(40):
            s = sample_posterior(data, PriorSpec(), r=1.0, m=10_000, seed=seed)
            if abs(geweke_z(s.alphas)) < 1.96 and abs(geweke_z(s.lambdas)) < 1.96:
                passed += 1
        assert passed / 40 >= 0.95
