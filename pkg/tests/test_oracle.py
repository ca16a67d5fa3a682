"""Verification engines: quadrature, seeded Monte-Carlo, finite differences."""

import math

import numpy as np
import pytest

from covpriors.errors import DomainError, ToleranceNotMetError
from covpriors.oracle import (
    IntegrationSpec,
    OracleEstimate,
    dirichlet_sampler,
    finite_diff_hessian,
    integrate_1d,
    integrate_nd,
    make_rng,
    mc_expectation,
)


class TestIntegrationSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            IntegrationSpec(scheme="bogus")
        with pytest.raises(DomainError):
            IntegrationSpec(abs_tol=-1.0)
        with pytest.raises(DomainError):
            IntegrationSpec(max_evals=0)

    def test_estimate_rel_error(self):
        est = OracleEstimate(value=2.0, error=1e-6, evals_used=10)
        assert est.rel_error == pytest.approx(5e-7)


class TestQuadrature:
    def test_linear(self):
        est = integrate_nd(lambda x: x, [(0.0, 1.0)])
        assert abs(est.value - 0.5) <= 1e-12
        assert est.error <= 1e-12

    def test_gaussian_normalization(self):
        est = integrate_nd(lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi),
                           [(-math.inf, math.inf)])
        assert abs(est.value - 1.0) <= 1e-10

    def test_log_integrand_with_huge_offset(self):
        est = integrate_nd(lambda x: -0.5 * (x - 3.0) ** 2 + 800.0,
                           [(-math.inf, math.inf)], log_integrand=True)
        assert est.log_value == pytest.approx(800.0 + 0.5 * math.log(2 * math.pi), abs=1e-9)

    def test_two_dimensional_gaussian(self):
        est = integrate_nd(
            lambda x, y: -0.5 * (x * x + y * y) - math.log(2 * math.pi),
            [(-math.inf, math.inf), (-math.inf, math.inf)], log_integrand=True)
        assert est.value == pytest.approx(1.0, rel=1e-8)

    def test_budget_exhaustion_carries_estimate(self):
        spec = IntegrationSpec(rel_tol=1e-13, abs_tol=1e-300, max_evals=75)
        with pytest.raises(ToleranceNotMetError) as info:
            integrate_nd(lambda x: np.exp(-0.5 * x * x), [(-math.inf, math.inf)], spec)
        assert info.value.estimate is not None

    def test_refinement_stays_within_previous_bound(self):
        def f(x):
            return np.sin(3.0 * x) ** 2 * np.exp(-x)

        coarse, err_c, _, _ = integrate_1d(f, 0.0, math.inf, rel_tol=1e-6)
        fine, _, _, _ = integrate_1d(f, 0.0, math.inf, rel_tol=5e-7)
        assert abs(fine - coarse) <= max(err_c, 1e-14)

    def test_empty_interval(self):
        with pytest.raises(DomainError):
            integrate_1d(lambda x: x, 1.0, 1.0)


class TestMonteCarlo:
    def test_constant_has_zero_error(self):
        mean, sem, n = mc_expectation(lambda rng, k: rng.standard_normal(k),
                                      lambda x: np.ones_like(x), 1000, seed=7)
        assert mean == 1.0
        assert sem == 0.0
        assert n == 1000

    def test_unit_variance_within_three_sigma(self):
        mean, sem, _ = mc_expectation(lambda rng, k: rng.standard_normal(k),
                                      lambda x: x * x, 1_000_000, seed=11)
        assert abs(mean - 1.0) <= 3.0 * sem

    def test_score_variance_oracle(self):
        mu = 0.0
        mean, sem, _ = mc_expectation(lambda rng, k: mu + rng.standard_normal(k),
                                      lambda x: (x - mu) ** 2, 1_000_000, seed=20240819)
        assert abs(mean - 1.0) <= 3.0 * sem

    def test_bit_reproducible(self):
        args = (lambda rng, k: rng.standard_normal(k), lambda x: np.cos(x), 10_000, 42)
        assert mc_expectation(*args) == mc_expectation(*args)

    def test_dirichlet_normalization_constant(self):
        # int over the 3-simplex of prod theta^(-1/2) equals
        # Gamma(1/2)^3 / Gamma(3/2) = 2 pi; importance-sample from
        # Dirichlet(3/4) so the weights have finite variance.
        prop = 0.75
        log_b = 3 * math.lgamma(prop) - math.lgamma(3 * prop)

        def g(draws):
            return np.exp((0.5 - prop) * np.log(draws).sum(axis=1) + log_b)

        mean, sem, _ = mc_expectation(dirichlet_sampler([prop] * 3), g, 400_000,
                                      seed=20240817)
        assert abs(mean - 2.0 * math.pi) <= 3.0 * sem

    def test_mc_agrees_with_quadrature(self):
        def f(x):
            return np.exp(-0.5 * x * x) * np.cos(x)

        quad = integrate_nd(f, [(-8.0, 8.0)])
        spec = IntegrationSpec(scheme="monte-carlo", seed=5, max_evals=1_000_000)
        mc = integrate_nd(f, [(-8.0, 8.0)], spec)
        assert abs(mc.value - quad.value) <= 3.0 * (mc.error + quad.error)

    def test_seed_validation(self):
        with pytest.raises(DomainError):
            make_rng(-1)

    def test_three_dim_box_uses_monte_carlo(self):
        est = integrate_nd(lambda x, y, z: x * y * z, [(0, 1), (0, 1), (0, 1)],
                           IntegrationSpec(seed=3, max_evals=200_000))
        assert est.value == pytest.approx(0.125, abs=3.0 * est.error)


class TestFiniteDifferences:
    def test_quadratic(self):
        hess = finite_diff_hessian(lambda v: float(v[0] ** 2), [0.0])
        assert hess[0, 0] == pytest.approx(2.0, abs=1e-7)

    def test_constant(self):
        hess = finite_diff_hessian(lambda v: 3.5, [1.0, -2.0])
        assert np.allclose(hess, 0.0, atol=1e-8)

    def test_gaussian_log_density_hessian(self):
        """Hand-differentiated check: for f = log N(x | mu, sigma),
        d2f/dmu2 = -1/s^2, d2f/ds2 = 1/s^2 - 3 (x-mu)^2/s^4,
        d2f/dmu ds = -2 (x-mu)/s^3."""
        x = 0.7

        def f(v):
            mu, s = float(v[0]), float(v[1])
            return -0.5 * math.log(2 * math.pi) - math.log(s) - (x - mu) ** 2 / (2 * s * s)

        mu, s = 0.2, 1.3
        hess = finite_diff_hessian(f, [mu, s])
        expected = np.array([
            [-1.0 / s ** 2, -2.0 * (x - mu) / s ** 3],
            [-2.0 * (x - mu) / s ** 3, 1.0 / s ** 2 - 3.0 * (x - mu) ** 2 / s ** 4],
        ])
        assert np.allclose(hess, expected, rtol=1e-5, atol=1e-6)

    def test_non_finite_raises(self):
        with pytest.raises(DomainError):
            finite_diff_hessian(lambda v: math.inf, [0.0])
