"""Information-geometry engine: metric computation, volume-element prior,
divergences, and reparameterization machinery."""

import math

import numpy as np
import pytest

from covpriors.errors import ConvergenceError, DegenerateMetricError, DomainError
from covpriors.geometry import (
    DataDomain,
    DiscreteData,
    LogDensityModel,
    Reparameterization,
    SampledData,
    fisher_information,
    fisher_information_batch,
    hellinger_sq_distance,
    jeffreys_log_density,
    jeffreys_log_density_batch,
    kl_divergence,
    reparameterize,
)
from covpriors.models import (
    bernoulli,
    exponential_rate,
    gaussian_location,
    gaussian_mean_sigma,
    gaussian_stdmean_sigma,
)
from covpriors.oracle import IntegrationSpec

SPEC = IntegrationSpec(rel_tol=1e-9)


def categorical_model(m: int) -> LogDensityModel:
    """Categorical draw with m cells; free parameters are the first m-1
    frequencies, the last is one minus their sum."""

    def log_density(x, alpha):
        theta = np.append(alpha, 1.0 - np.sum(alpha))
        x = np.asarray(x, dtype=int)
        return np.log(theta[x])

    return LogDensityModel(
        param_dim=m - 1, log_density=log_density,
        support=tuple((0.0, 1.0) for _ in range(m - 1)),
        expectation_scheme=DiscreteData(points=tuple(range(m))),
        name=f"categorical-{m}")


class TestFisherInformation:
    def test_gaussian_location_unit(self):
        fim = fisher_information(gaussian_location(), [0.0], SPEC)
        assert fim.matrix[0, 0] == pytest.approx(1.0, rel=1e-6)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_gaussian_mean_sigma_matches_score_oracle(self, sigma):
        model = gaussian_mean_sigma()
        hess = fisher_information(model, [0.2, sigma], SPEC, form="hessian")
        score = fisher_information(model, [0.2, sigma], SPEC, form="score")
        exact = np.diag([1.0 / sigma ** 2, 2.0 / sigma ** 2])
        assert np.allclose(hess.matrix, exact, rtol=1e-5, atol=1e-7)
        assert np.allclose(score.matrix, exact, rtol=1e-5, atol=1e-7)

    def test_bernoulli_exact_two_term_sum(self):
        # hand check: E[(d/dtheta log p)^2] = theta (1/theta)^2
        #             + (1-theta) (1/(1-theta))^2 = 1/(theta (1-theta))
        theta = 0.3
        fim = fisher_information(bernoulli(), [theta], SPEC)
        assert fim.matrix[0, 0] == pytest.approx(1.0 / (theta * (1.0 - theta)), rel=1e-6)

    def test_two_forms_agree(self):
        for model, at in ((gaussian_mean_sigma(), [0.1, 1.4]),
                          (bernoulli(), [0.42]),
                          (exponential_rate(), [0.8])):
            h = fisher_information(model, at, SPEC, form="hessian").matrix
            s = fisher_information(model, at, SPEC, form="score").matrix
            scale = np.abs(s).max()
            assert np.abs(h - s).max() / scale < 1e-6

    def test_out_of_support(self):
        with pytest.raises(DomainError):
            fisher_information(bernoulli(), [1.2], SPEC)

    def test_refinement_stability(self):
        loose = fisher_information(gaussian_mean_sigma(), [0.0, 1.0],
                                   IntegrationSpec(rel_tol=1e-6)).matrix
        tight = fisher_information(gaussian_mean_sigma(), [0.0, 1.0],
                                   IntegrationSpec(rel_tol=1e-10)).matrix
        assert np.abs(loose - tight).max() < 1e-5

    def test_batch_matches_single(self):
        model = gaussian_mean_sigma()
        pts = np.array([[0.0, 0.7], [0.4, 1.0], [-1.0, 2.5]])
        batch = fisher_information_batch(model, pts, SPEC, form="score")
        for i, p in enumerate(pts):
            single = fisher_information(model, p, SPEC, form="score").matrix
            assert np.allclose(batch[i], single, rtol=1e-7, atol=1e-9)

    def test_monte_carlo_scheme(self):
        def sampler(rng, n, alpha):
            return alpha[0] + rng.standard_normal(n)

        model = LogDensityModel(
            param_dim=1,
            log_density=lambda x, a: -0.5 * math.log(2 * math.pi) - (np.asarray(x) - a[0]) ** 2 / 2.0,
            support=((-math.inf, math.inf),),
            expectation_scheme=SampledData(sampler=sampler), name="mc-gaussian")
        fim = fisher_information(model, [0.3], IntegrationSpec(seed=9, max_evals=200_000))
        assert fim.matrix[0, 0] == pytest.approx(1.0, abs=0.02)


class TestJeffreysDensity:
    def test_location_model_flat(self):
        assert jeffreys_log_density(gaussian_location(), [1.7], SPEC) == pytest.approx(0.0, abs=1e-7)

    def test_mean_sigma_value(self):
        val = jeffreys_log_density(gaussian_mean_sigma(), [0.0, 2.0], SPEC)
        assert val == pytest.approx(0.5 * math.log(2.0 / 16.0), abs=1e-7)

    def test_bernoulli_midpoint(self):
        val = jeffreys_log_density(bernoulli(), [0.5], SPEC)
        assert val == pytest.approx(math.log(2.0), abs=1e-7)

    def test_degenerate_metric(self):
        flat = LogDensityModel(
            param_dim=1,
            log_density=lambda x, a: -0.5 * math.log(2 * math.pi) - np.asarray(x) ** 2 / 2.0,
            support=((-1.0, 1.0),), expectation_scheme=DataDomain(), name="no-parameter")
        with pytest.raises(DegenerateMetricError):
            jeffreys_log_density(flat, [0.0], SPEC)

    def test_matches_dirichlet_half_density(self):
        """For the categorical model the volume-element prior must equal
        the symmetric Dirichlet(1/2) density up to one additive constant."""
        model = categorical_model(3)
        rng = np.random.default_rng(77)
        raw = rng.dirichlet([1.0, 1.0, 1.0], size=20) * 0.85 + 0.05
        pts = raw[:, :2]
        # a tighter step keeps the finite-difference truncation error of the
        # near-edge curvature well below the comparison tolerance
        ours = jeffreys_log_density_batch(model, pts, SPEC, step_scale=2e-5)
        theta3 = 1.0 - pts.sum(axis=1)
        reference = -0.5 * (np.log(pts).sum(axis=1) + np.log(theta3))
        diff = ours - reference
        assert np.ptp(diff) < 1e-6


class TestDivergences:
    def test_hellinger_zero_at_equal_points(self):
        assert hellinger_sq_distance(gaussian_location(), [0.4], [0.4], SPEC) <= 1e-12

    def test_hellinger_gaussian_closed_form(self):
        # affinity of two unit Gaussians is exp(-(dmu)^2/8)
        val = hellinger_sq_distance(gaussian_location(), [0.0], [1.0], SPEC)
        assert val == pytest.approx(2.0 * (1.0 - math.exp(-0.125)), rel=1e-9)

    def test_hellinger_symmetric(self):
        a = hellinger_sq_distance(gaussian_location(), [0.0], [0.9], SPEC)
        b = hellinger_sq_distance(gaussian_location(), [0.9], [0.0], SPEC)
        assert abs(a - b) < 1e-10

    def test_hellinger_small_step_quarter_metric(self):
        d = 1e-3
        val = hellinger_sq_distance(gaussian_location(), [0.0], [d], SPEC)
        assert val == pytest.approx(0.25 * 1.0 * d * d, rel=1e-3)

    def test_kl_zero_and_gaussian_value(self):
        model = gaussian_location()
        assert kl_divergence(model, [0.3], [0.3], SPEC) <= 1e-12
        assert kl_divergence(model, [1.0], [0.0], SPEC) == pytest.approx(0.5, rel=1e-9)

    def test_kl_quadratic_expansion(self):
        h = 1e-3
        for model, at in ((gaussian_location(), [0.4]),
                          (bernoulli(), [0.3]),
                          (exponential_rate(), [2.0])):
            at = np.asarray(at, dtype=float)
            j = fisher_information(model, at, SPEC).matrix[0, 0]
            d = kl_divergence(model, at + h, at, SPEC)
            assert d / (0.5 * j * h * h) == pytest.approx(1.0, abs=1e-3)


class TestReparameterization:
    def test_identity(self):
        model = gaussian_location()
        ident = Reparameterization(forward=lambda a: a, inverse=lambda b: b)
        again = reparameterize(model, ident)
        xs = np.linspace(-3, 3, 11)
        assert np.allclose(again.log_density(xs, np.array([0.8])),
                           model.log_density(xs, np.array([0.8])))

    def test_scaling_transforms_metric(self):
        # beta = 2 mu halves the score, so the information drops to 1/4
        model = gaussian_location()
        rep = Reparameterization(forward=lambda a: 2.0 * a, inverse=lambda b: 0.5 * b)
        fim = fisher_information(reparameterize(model, rep), [0.6], SPEC)
        assert fim.matrix[0, 0] == pytest.approx(0.25, rel=1e-6)

    def test_chain_rule_covariance(self):
        """sqrt(J'(beta)) = sqrt(J(alpha(beta))) |d alpha/d beta| for smooth
        monotone 1-D maps."""
        cases = [
            (gaussian_location(), [0.5],
             Reparameterization(lambda a: np.sinh(a), lambda b: np.arcsinh(b))),
            (exponential_rate(), [1.3],
             Reparameterization(lambda a: np.log(a), lambda b: np.exp(b))),
            (bernoulli(), [0.35],
             Reparameterization(lambda a: a ** 2, lambda b: np.sqrt(b))),
        ]
        for model, alpha, rep in cases:
            alpha = np.asarray(alpha, dtype=float)
            beta = np.atleast_1d(rep.forward(alpha))
            new = reparameterize(model, rep)
            j_new = fisher_information(new, beta, SPEC, form="score").matrix[0, 0]
            j_old = fisher_information(model, alpha, SPEC, form="score").matrix[0, 0]
            dadb = rep.jacobian_at(beta)[0, 0]
            assert math.sqrt(j_new) == pytest.approx(
                math.sqrt(j_old) * abs(dadb), rel=1e-6)

    def test_stdmean_relabelling_matches_direct_model(self):
        base = gaussian_mean_sigma()
        rep = Reparameterization(
            forward=lambda a: np.array([a[0] / a[1], a[1]]),
            inverse=lambda b: np.array([b[0] * b[1], b[1]]))
        relabelled = reparameterize(base, rep)
        direct = gaussian_stdmean_sigma()
        xs = np.linspace(-3, 3, 13)
        for point in ([0.7, 1.3], [-0.4, 0.6]):
            assert np.allclose(relabelled.log_density(xs, np.array(point)),
                               direct.log_density(xs, np.array(point)))
        assert relabelled.support[1][0] == 0.0

    def test_inverse_failure(self):
        model = gaussian_location()
        rep = Reparameterization(forward=lambda a: a, inverse=lambda b: b * np.nan)
        with pytest.raises(DomainError):
            reparameterize(model, rep).log_density(0.0, np.array([1.0]))

    def test_batch_path_requires_batched_inverse(self):
        """Without inverse_batch the fast path must be dropped, never fed
        beta rows meant for alpha."""
        from covpriors.geometry import log_density_many

        model = bernoulli()
        rep = Reparameterization(forward=lambda a: a ** 2, inverse=lambda b: np.sqrt(b))
        new = reparameterize(model, rep)
        assert new.log_density_batch is None
        betas = np.array([[0.25], [0.49]])
        vals = log_density_many(new, np.array([1.0]), betas)
        assert np.allclose(vals[:, 0], np.log(np.sqrt(betas[:, 0])))

        rep2 = Reparameterization(forward=lambda a: a ** 2, inverse=lambda b: np.sqrt(b),
                                  inverse_batch=np.sqrt)
        new2 = reparameterize(model, rep2)
        vals2 = log_density_many(new2, np.array([1.0]), betas)
        assert np.allclose(vals2, vals)


class TestModelValidation:
    def test_support_shape_checked(self):
        with pytest.raises(DomainError):
            LogDensityModel(param_dim=2, log_density=lambda x, a: 0.0,
                            support=((0.0, 1.0),))

    def test_empty_interval(self):
        with pytest.raises(DomainError):
            LogDensityModel(param_dim=1, log_density=lambda x, a: 0.0,
                            support=((1.0, 1.0),))

    def test_fisher_matrix_psd_guard(self):
        from covpriors.geometry import FisherMatrix

        with pytest.raises(ConvergenceError):
            FisherMatrix(at_param=[0.0], matrix=[[-1.0]])
