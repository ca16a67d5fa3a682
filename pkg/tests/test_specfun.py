"""Special-function kernel: frozen oracle values, closed-form anchors, and
domain invariants.

Oracle provenance: values marked "frozen" were produced by the independent
engines in covpriors.oracle (adaptive quadrature of the defining integrals
at 1e-12, exact-rational series summation, seeded Monte-Carlo); the same
computations live on in data/oracle_fixtures.txt and are re-runnable via
the verify subcommand.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covpriors import specfun as sf
from covpriors.errors import DomainError
from covpriors.oracle import integrate_1d


class TestLogGamma:
    def test_unit_values(self):
        assert sf.log_gamma(1.0) == pytest.approx(0.0, abs=1e-14)
        assert sf.log_gamma(2.0) == pytest.approx(0.0, abs=1e-14)

    def test_half(self):
        assert sf.log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-13)

    def test_factorial(self):
        assert sf.log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-13)

    def test_domain(self):
        for bad in (0.0, -1.0, -0.5, math.nan):
            with pytest.raises(DomainError):
                sf.log_gamma(bad)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.5, max_value=100.0, allow_nan=False))
    def test_recurrence(self, x):
        """Gamma(x+1) = x Gamma(x), i.e. log form with log(x) added."""
        lhs = sf.log_gamma(x + 1.0)
        rhs = sf.log_gamma(x) + math.log(x)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_wide_range_against_quadrature_anchor(self):
        # int_0^inf t^(x-1) e^-t dt at a few anchors, via the oracle
        for x in (1.5, 4.0, 12.5):
            val, err, _, _ = integrate_1d(
                lambda t, x=x: np.exp((x - 1.0) * np.log(t) - t), 0.0, math.inf,
                rel_tol=1e-12)
            assert sf.log_gamma(x) == pytest.approx(math.log(val), rel=1e-11)


class TestIncompleteGamma:
    def test_reduces_to_gamma(self):
        assert sf.gen_incomplete_gamma(3.0, 0.0, math.inf) == pytest.approx(2.0, rel=1e-12)

    def test_exponential_segment(self):
        assert sf.gen_incomplete_gamma(1.0, 0.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_frozen_quadrature_value(self):
        # frozen: adaptive quadrature of t^1.5 e^-t over [0.3, 4.0] at 1e-12
        assert sf.gen_incomplete_gamma(2.5, 0.3, 4.0) == pytest.approx(
            1.1057022844865663, rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.gen_incomplete_gamma(-1.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            sf.gen_incomplete_gamma(1.0, 2.0, 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(min_value=0.1, max_value=50.0),
           st.floats(min_value=1e-3, max_value=80.0))
    def test_split_identity(self, a, z):
        """gamma(a,0,z) + gamma(a,z,inf) = Gamma(a)."""
        total = sf.gen_incomplete_gamma(a, 0.0, z) + sf.gen_incomplete_gamma(a, z, math.inf)
        assert total == pytest.approx(math.exp(sf.log_gamma(a)), rel=1e-10)

    def test_log_forms_consistent(self):
        for a, x in ((2.5, 0.3), (11.0, 1100.0), (50.0, 50.0), (100.0, 30.0)):
            p = math.exp(sf.log_lower_gamma(a, x) - sf.log_gamma(a))
            q = math.exp(sf.log_upper_gamma(a, x) - sf.log_gamma(a))
            assert p + q == pytest.approx(1.0, rel=1e-12)
            assert sf.reg_lower_gamma(a, x) == pytest.approx(p, rel=1e-13)


class TestBesselK0:
    def test_frozen_integral_values(self):
        # frozen: quadrature of int_0^inf exp(-x cosh t) dt at 1e-12
        assert sf.bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-10)
        assert sf.bessel_k0(0.5) == pytest.approx(0.9244190712276659, rel=1e-10)

    def test_exponential_decay(self):
        assert sf.bessel_k0(30.0) < 1e-12

    def test_against_integral_representation(self):
        def oracle(x):
            def integrand(t):
                with np.errstate(over="ignore"):
                    return np.exp(-x * np.cosh(t))

            val, _, _, _ = integrate_1d(integrand, 0.0, math.inf, rel_tol=1e-12)
            return val

        for x in (1e-3, 0.1, 2.0, 3.5, 10.0, 50.0):
            assert sf.bessel_k0(x) == pytest.approx(oracle(x), rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.bessel_k0(0.0)
        with pytest.raises(DomainError):
            sf.bessel_k0(-1.0)


class TestHyp2F1:
    def test_at_zero(self):
        assert sf.hyp2f1(0.3, 4.7, 1.9, 0.0) == 1.0

    def test_frozen_series_value(self):
        # frozen: 200-term Gauss series in exact rational arithmetic
        assert sf.hyp2f1(0.5, 6.5, 1.5, -0.1) == pytest.approx(
            0.82377055597086379, rel=1e-9)

    def test_log_identity(self):
        # 2F1(1,1;2;z) = -log(1-z)/z
        z = -0.5
        assert sf.hyp2f1(1.0, 1.0, 2.0, z) == pytest.approx(
            -math.log1p(-z) / z, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.hyp2f1(0.5, 1.0, 1.5, 0.25)
        with pytest.raises(DomainError):
            sf.hyp2f1(0.5, 1.0, 1.5, -1.0)
        with pytest.raises(DomainError):
            sf.hyp2f1(0.5, 1.0, -2.0, -0.1)

    def test_near_minus_one(self):
        # Pfaff-transformed series must stay accurate deep into the interval:
        # compare against the binomial special case 2F1(a, b; b; z) = (1-z)^(-a).
        z = -0.999
        assert sf.hyp2f1(0.75, 2.5, 2.5, z) == pytest.approx(
            (1.0 - z) ** -0.75, rel=1e-12)


class TestNoncentralChi2:
    def test_central_special_case(self):
        val = sf.noncentral_chi2_pdf(1, 0.0, 1.0)
        assert val == pytest.approx(math.exp(-0.5) / math.sqrt(2.0 * math.pi), rel=1e-12)

    def test_frozen_monte_carlo_density(self):
        # frozen: histogram of (Z + 2)^2 in a 0.1-wide window, 1e7 draws,
        # seed 20240820; tolerance is three standard errors.
        assert abs(sf.noncentral_chi2_pdf(1, 4.0, 2.0) - 0.118763) <= 0.0010277

    def test_mean_is_one_plus_noncentrality(self):
        for x0 in (0.0, 1.0, 2.5):
            def integrand(u, x0=x0):
                vals = np.array([sf.noncentral_chi2_pdf(1, x0 * x0, float(v * v)) * 2.0 * v ** 3
                                 for v in np.atleast_1d(u)])
                return vals

            val, _, _, _ = integrate_1d(integrand, 0.0, math.inf, rel_tol=1e-9)
            assert val == pytest.approx(1.0 + x0 * x0, rel=1e-8)

    @pytest.mark.parametrize("noncentrality", [0.0, 1.0, 10.0])
    @pytest.mark.parametrize("dof", list(range(1, 31)))
    def test_normalization(self, dof, noncentrality):
        # substitution x = u^2 regularizes the dof=1 endpoint singularity
        def integrand(u):
            return np.array([sf.noncentral_chi2_pdf(dof, noncentrality, float(v * v)) * 2.0 * v
                             for v in np.atleast_1d(u)])

        val, _, _, _ = integrate_1d(integrand, 0.0, math.inf, rel_tol=3e-9,
                                    max_evals=100_000)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            sf.noncentral_chi2_pdf(1, 0.0, 0.0)
        with pytest.raises(DomainError):
            sf.noncentral_chi2_pdf(0, 0.0, 1.0)
        with pytest.raises(DomainError):
            sf.noncentral_chi2_pdf(1, -1.0, 1.0)


class TestResultWrapper:
    def test_attaches_error_bound(self):
        res = sf.evaluate("bessel_k0", 1.0)
        assert res.value == sf.bessel_k0(1.0)
        assert 0.0 < res.est_abs_error <= 1e-10 * res.value * 1.0001
        assert abs(res.value - 0.42102443824070834) <= res.est_abs_error * 10

    def test_unknown_kernel(self):
        with pytest.raises(DomainError):
            sf.evaluate("bogus", 1.0)

    def test_negative_error_rejected(self):
        with pytest.raises(DomainError):
            sf.SpecFunResult(value=1.0, est_abs_error=-1.0)


def test_fuzz_all_finite():
    """Every kernel returns finite values across its documented domain."""
    rng = np.random.default_rng(1234)
    xs = np.exp(rng.uniform(math.log(1e-3), math.log(1e6), size=10_000))
    assert all(math.isfinite(sf.log_gamma(float(x))) for x in xs)
    k0_args = np.exp(rng.uniform(math.log(1e-3), math.log(50.0), size=10_000))
    assert all(math.isfinite(sf.bessel_k0(float(x))) for x in k0_args)
    a = np.exp(rng.uniform(math.log(0.1), math.log(100.0), size=2_000))
    z1 = np.exp(rng.uniform(math.log(1e-3), math.log(50.0), size=2_000))
    dz = np.exp(rng.uniform(math.log(1e-3), math.log(50.0), size=2_000))
    assert all(math.isfinite(sf.gen_incomplete_gamma(float(av), float(lo), float(lo + d)))
               for av, lo, d in zip(a, z1, dz))
    zs = rng.uniform(-0.999, 0.0, size=2_000)
    assert all(math.isfinite(sf.hyp2f1(0.5, 6.5, 1.5, float(z))) for z in zs)
    dofs = rng.integers(1, 31, size=2_000)
    lams = rng.uniform(0.0, 20.0, size=2_000)
    pts = np.exp(rng.uniform(math.log(1e-4), math.log(100.0), size=2_000))
    assert all(math.isfinite(sf.noncentral_chi2_pdf(int(d), float(l), float(x)))
               for d, l, x in zip(dofs, lams, pts))
