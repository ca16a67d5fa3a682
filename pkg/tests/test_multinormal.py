"""Common-scale Gaussian measurands: evidence, Student posterior, and the
credible-ball probability."""

import math

import numpy as np
import pytest

from covpriors.casestudies import multinormal as mn
from covpriors.errors import DomainError
from covpriors.oracle import IntegrationSpec, integrate_1d, integrate_nd
from covpriors.specfun import log_gamma


class TestEvidence:
    def test_m1_n2_closed_value(self):
        inp = mn.MultinormalInput(m=1, n=2, pooled_s2=1.0, sigma0=1.0, v_mu=1.0)
        rep = mn.multinormal_summary(inp)
        assert rep.scalars["evidence"] == pytest.approx(
            math.sqrt(2.0) / (2.0 * math.sqrt(8.0 * math.pi)), rel=1e-12)
        assert rep.flags["approximate_domain"]
        assert rep.flags["moments_undefined"]

    def test_m1_matches_joint_quadrature(self):
        n, s2 = 4, 1.3
        inp = mn.MultinormalInput(m=1, n=n, pooled_s2=s2, sigma0=0.7, v_mu=2.0)
        rep = mn.multinormal_summary(inp)

        def log_f(mu, sigma):
            lik = (-0.5 * n * np.log(2 * np.pi) - n * np.log(sigma)
                   - n * (s2 + mu * mu) / (2 * sigma * sigma))
            prior = (math.log(inp.sigma0) - math.log(inp.v_mu) - 2.0 * np.log(sigma))
            return lik + prior

        est = integrate_nd(log_f, [(-np.inf, np.inf), (0.0, np.inf)],
                           IntegrationSpec(rel_tol=1e-8), log_integrand=True)
        assert est.log_value == pytest.approx(rep.scalars["log_evidence"], abs=1e-6)

    def test_m2_matches_reduced_quadrature(self):
        """Means integrated out analytically (each contributes a Gaussian
        normalization (2 pi sigma^2/n)^(1/2)); the remaining sigma integral
        is evaluated numerically."""
        m, n, s2 = 2, 3, 0.7
        inp = mn.MultinormalInput(m=m, n=n, pooled_s2=s2, sigma0=0.7, v_mu=2.0)
        rep = mn.multinormal_summary(inp)
        mn_tot = m * n

        def log_g(sigma):
            return (-0.5 * mn_tot * np.log(2 * np.pi) - mn_tot * np.log(sigma)
                    - mn_tot * s2 / (2 * sigma * sigma)
                    + 0.5 * m * (np.log(2 * np.pi / n) + 2 * np.log(sigma))
                    + math.log(m) + m * math.log(inp.sigma0) - math.log(inp.v_mu)
                    - (m + 1) * np.log(sigma))

        val, _, _, shift = integrate_1d(log_g, 0.0, np.inf, rel_tol=1e-10,
                                        log_integrand=True)
        assert math.log(val) + shift == pytest.approx(rep.scalars["log_evidence"], abs=1e-8)

    def test_input_validation(self):
        with pytest.raises(DomainError):
            mn.MultinormalInput(m=0, n=2, pooled_s2=1.0)
        with pytest.raises(DomainError):
            mn.MultinormalInput(m=2, n=2, pooled_s2=-1.0)
        with pytest.raises(DomainError):
            mn.MultinormalInput(m=2, n=2, pooled_s2=1.0, q=3)
        with pytest.raises(DomainError):
            mn.multinormal_summary(mn.MultinormalInput(m=1, n=2, pooled_s2=1.0),
                                   require_moments=True)


class TestSubsetPosterior:
    def test_variance_independent_of_q(self):
        base = dict(m=4, n=3, pooled_s2=1.7)
        rep_one = mn.multinormal_summary(mn.MultinormalInput(q=1, **base))
        rep_all = mn.multinormal_summary(mn.MultinormalInput(q=4, **base))
        assert rep_one.scalars["posterior_variance_per_coordinate"] == pytest.approx(
            rep_all.scalars["posterior_variance_per_coordinate"], rel=1e-14)
        assert rep_one.scalars["credible_ball_probability_q"] > \
            rep_all.scalars["credible_ball_probability_q"]

    def test_m1_q1_is_scaled_student(self):
        """With a single measurand the posterior in t = (mu - xbar)/s is a
        Student shape with mn = n degrees of freedom."""
        n = 6
        inp = mn.MultinormalInput(m=1, n=n, pooled_s2=1.0)
        mus = np.linspace(-3.0, 3.0, 25)[:, None]
        ours = mn.subset_posterior_log_density(inp, mus)
        t2 = mus[:, 0] ** 2
        expected = (log_gamma(0.5 * (n + 1)) - log_gamma(0.5 * n)
                    - 0.5 * math.log(math.pi) - 0.5 * (n + 1) * np.log1p(t2))
        assert np.allclose(ours, expected, atol=1e-12)

    def test_normalizes(self):
        inp = mn.MultinormalInput(m=3, n=4, pooled_s2=0.9, q=1)

        def f(mu):
            return np.exp(mn.subset_posterior_log_density(inp, np.atleast_1d(mu)[:, None]))

        val, _, _, _ = integrate_1d(f, -np.inf, np.inf, rel_tol=1e-10)
        assert val == pytest.approx(1.0, rel=1e-8)


class TestCredibleBall:
    def test_q1_matches_student_interval_oracle(self):
        # oracle: radial Student integral with an lgamma front factor
        q, mn_dof = 1, 12
        c = 1.0 / math.sqrt(mn_dof - 2.0)
        front = 2.0 * math.exp(math.lgamma(0.5 * (mn_dof + q)) - math.lgamma(0.5 * mn_dof)
                               - math.lgamma(0.5 * q))
        val, _, _, _ = integrate_1d(
            lambda t: (1.0 + t * t) ** (-0.5 * (mn_dof + q)), 0.0, c, rel_tol=1e-12)
        assert mn.credible_ball_probability(1, 12) == pytest.approx(front * val, rel=1e-9)

    @pytest.mark.parametrize("q", [2, 5, 12])
    def test_any_q_matches_radial_oracle(self, q):
        mn_dof = 12
        c = 1.0 / math.sqrt(mn_dof - 2.0)
        front = 2.0 * math.exp(math.lgamma(0.5 * (mn_dof + q)) - math.lgamma(0.5 * mn_dof)
                               - math.lgamma(0.5 * q))
        val, _, _, _ = integrate_1d(
            lambda t: t ** (q - 1) * (1.0 + t * t) ** (-0.5 * (mn_dof + q)), 0.0, c,
            rel_tol=1e-12)
        assert mn.credible_ball_probability(q, mn_dof) == pytest.approx(front * val, rel=1e-9)

    def test_monotone_decrease(self):
        vals = [mn.credible_ball_probability(q, 12) for q in range(1, 13)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[0] < 1.0 and vals[-1] > 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            mn.credible_ball_probability(0, 12)
        with pytest.raises(DomainError):
            mn.credible_ball_probability(1, 2)
