"""Mean power of several Gaussian signals: shrinkage through model averaging.

Observations x_1..x_m are unit-variance Gaussian readings of unknown
amplitudes mu_i.  A flat amplitude prior makes each mu_i^2 a non-central
chi-square variable and the mean power theta^2 = sum(mu_i^2)/m acquires the
posterior mean 1 + mean(x^2), while the frequentist expectation of that
same estimator is 2 + theta^2: for large m the two statements contradict
each other.

Bounding the amplitude domain restores consistency.  The bounded model is
hyper-parameterized by a centre b and half-width-like scale a; a Gaussian
N(mu_i | b, a) stands in for the flat gate prior on [b - sqrt(3) a,
b + sqrt(3) a] to keep the algebra closed.  The volume-element prior of the
hyper-parameters is a/(1+a^2)^(3/2), and conditioning on the data gives the
hyper-posterior below.  Averaging the conditional posterior moments over it
yields closed forms in which every hyper-model integral reduces to moments
of u = 1/(1+a^2):

    E[u^k | data] = gamma(m/2 + k, z0) / (z0^k gamma(m/2, z0)),

with z0 = m s_x^2 / 2 and gamma the lower incomplete gamma function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..specfun import log_lower_gamma
from .report import CaseStudyReport

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SteinInput:
    """Unit-variance Gaussian observations of m signal amplitudes."""

    x: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        if len(x) < 1:
            raise DomainError("need at least one observation")
        object.__setattr__(self, "x", x)

    @property
    def m(self) -> int:
        return len(self.x)

    @property
    def xbar(self) -> float:
        return sum(self.x) / self.m

    @property
    def sample_var(self) -> float:
        xb = self.xbar
        return sum((v - xb) ** 2 for v in self.x) / self.m

    @property
    def mean_square(self) -> float:
        return sum(v * v for v in self.x) / self.m


def flat_model_moments(inp: SteinInput) -> tuple:
    """Posterior mean and variance of the mean power under flat priors:

        (1 + mean(x^2),  2 (1 + 2 mean(x^2)) / m).
    """
    ms = inp.mean_square
    return 1.0 + ms, 2.0 * (1.0 + 2.0 * ms) / inp.m


def frequentist_estimator_mean(theta2: float) -> float:
    """Sampling expectation of the flat-model point estimate 1 + mean(x^2):
    biased upward by two units of variance."""
    return 2.0 + theta2


def conditional_mean(x_i: float, b: float, a: float) -> float:
    """Posterior mean of one amplitude given the hyper-parameters:
    (a^2 x_i + b) / (1 + a^2)."""
    if not a > 0.0:
        raise DomainError("hyper-scale a must be positive")
    return (a * a * x_i + b) / (1.0 + a * a)


def conditional_variance(a: float) -> float:
    """Posterior variance of one amplitude given the hyper-parameters."""
    if not a > 0.0:
        raise DomainError("hyper-scale a must be positive")
    return a * a / (1.0 + a * a)


def conditional_second_moment(x_i: float, b: float, a: float) -> float:
    """Posterior mean of mu_i^2 given the hyper-parameters."""
    mu = conditional_mean(x_i, b, a)
    return conditional_variance(a) + mu * mu


def mode_conditional_second_moment(x: float) -> float:
    """E(mu^2) at single-datum hyper-posterior mode (b = x, a = 1/sqrt(3)):
    exactly 1/4 + x^2."""
    return 0.25 + x * x


def gaussian_prior_log_density(mu, b: float, a: float):
    """log N(mu | b, a): the analytic surrogate for the gate prior."""
    if not a > 0.0:
        raise DomainError("hyper-scale a must be positive")
    mu = np.asarray(mu, dtype=float)
    return -0.5 * _LOG_2PI - math.log(a) - (mu - b) ** 2 / (2.0 * a * a)


def gate_prior_log_density(mu, b: float, a: float):
    """log of the uniform density on [b - sqrt(3) a, b + sqrt(3) a].

    Matches the Gaussian surrogate's mean and variance.  Exposed only for
    side-by-side comparison; the averaged closed forms below use the
    Gaussian surrogate throughout.
    """
    if not a > 0.0:
        raise DomainError("hyper-scale a must be positive")
    mu = np.asarray(mu, dtype=float)
    half = math.sqrt(3.0) * a
    inside = np.abs(mu - b) <= half
    return np.where(inside, -math.log(2.0 * half), -np.inf)


def marginal_likelihood_one(x_i, b, a):
    """Marginal density of one observation given the hyper-parameters:
    N(x_i | b, sqrt(1 + a^2))."""
    x_i = np.asarray(x_i, dtype=float)
    s2 = 1.0 + np.asarray(a, dtype=float) ** 2
    return np.exp(-0.5 * _LOG_2PI - 0.5 * np.log(s2) - (x_i - b) ** 2 / (2.0 * s2))


def log_hyper_posterior(b, a, xbar: float, s_x2: float, m: int):
    """log posterior density of the hyper-parameters (b, a) given the
    sample mean and biased sample variance of m observations:

        sqrt(2 m (m s_x^2 / 2)^m / pi) a
        --------------------------------------------  exp[-m (s_x^2 + (b - xbar)^2) / (2 (1+a^2))]
        sqrt((1+a^2)^(m+3)) gamma(m/2, m s_x^2 / 2)

    A single observation has s_x^2 = 0; the prefactor limit then gives
    a exp[-(b-x)^2/(2(1+a^2))] / (sqrt(2 pi) (1+a^2)^2), whose mode sits at
    (b = x, a = 1/sqrt(3)).  Normalized over b in R, a > 0; the maximum
    over b always sits at b = xbar.
    """
    if m < 1:
        raise DomainError("need m >= 1 observations")
    if s_x2 < 0.0:
        raise DomainError("sample variance cannot be negative")
    if m >= 2 and s_x2 == 0.0:
        raise DomainError("m >= 2 observations with zero sample variance are degenerate")
    b = np.asarray(b, dtype=float)
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0.0):
        raise DomainError("hyper-scale a must be positive")
    if m == 1:
        # z0 -> 0 limit: sqrt(2 z0^1 ...) / gamma(1/2, z0) -> 1/sqrt(2).
        log_norm = -0.5 * _LOG_2PI
        return (log_norm + np.log(a) - 2.0 * np.log1p(a * a)
                - (b - xbar) ** 2 / (2.0 * (1.0 + a * a)))
    z0 = 0.5 * m * s_x2
    log_norm = 0.5 * (math.log(2.0 * m) + m * math.log(z0) - math.log(math.pi)) \
        - log_lower_gamma(0.5 * m, z0)
    return (log_norm + np.log(a) - 0.5 * (m + 3) * np.log1p(a * a)
            - m * (s_x2 + (b - xbar) ** 2) / (2.0 * (1.0 + a * a)))


def hyper_posterior(b, a, xbar: float, s_x2: float, m: int):
    return np.exp(log_hyper_posterior(b, a, xbar, s_x2, m))


def _inv_one_plus_a2_moment(m: int, s_x2: float, k: int) -> float:
    """E[(1 + a^2)^(-k)] under the hyper-posterior."""
    if m < 2 or not s_x2 > 0.0:
        raise DomainError("hyper-model averages need m >= 2 and positive sample variance")
    z0 = 0.5 * m * s_x2
    return math.exp(log_lower_gamma(0.5 * m + k, z0) - k * math.log(z0)
                    - log_lower_gamma(0.5 * m, z0))


def averaged_mean(x_i: float, xbar: float, s_x2: float, m: int) -> float:
    """Amplitude posterior mean averaged over the hyper-models.

    The conditional mean x_i - (x_i - b)/(1+a^2) averages to

        x_i - (x_i - xbar) E[1/(1+a^2)],

    shrinking x_i toward the sample mean by a factor that goes to
    m/(m+2) as s_x -> 0 and to zero (about 1/s_x^2) as s_x grows.
    """
    return x_i - (x_i - xbar) * _inv_one_plus_a2_moment(m, s_x2, 1)


def averaged_second_moment(x_i: float, xbar: float, s_x2: float, m: int) -> float:
    """Posterior mean of mu_i^2 averaged over the hyper-models:

        x_i^2 + 1 + c1 E[u] + c2 E[u^2],  u = 1/(1+a^2),

    with c1 = (1 - m - 2 m x_i (x_i - xbar))/m and c2 = (x_i - xbar)^2.
    Limits: x_i^2 + 1 - (m-1)/(m+2) as s_x -> 0 with xbar = x_i;
    x_i^2 + 1 as s_x -> inf; xbar^2 as m -> inf at s_x = 1.
    """
    c1 = (1.0 - m - 2.0 * m * x_i * (x_i - xbar)) / m
    c2 = (x_i - xbar) ** 2
    return (x_i * x_i + 1.0
            + c1 * _inv_one_plus_a2_moment(m, s_x2, 1)
            + c2 * _inv_one_plus_a2_moment(m, s_x2, 2))


def averaged_mean_power(mean_square: float, s_x2: float, m: int) -> float:
    """Expected mean power averaged over the hyper-models:

        1 + mean(x^2) + (1/m - 1 - 2 s_x^2) E[u] + s_x^2 E[u^2].

    As s_x -> 0 this tends to mean(x^2) + 3/(m+2) (the flat-model value
    minus the shrink, approaching mean(x^2) for many signals); as s_x grows
    it tends to mean(x^2) - 1 + 3/(m s_x^2), the unbiased-estimate value;
    for m -> inf with s_x^2 > 1 it equals mean(x^2) - 1 identically.  The
    closed form stays finite for all s_x > 0 because it is assembled from
    lower-incomplete-gamma ratios rather than differences of complete
    gamma functions.
    """
    u1 = _inv_one_plus_a2_moment(m, s_x2, 1)
    u2 = _inv_one_plus_a2_moment(m, s_x2, 2)
    return 1.0 + mean_square + (1.0 / m - 1.0 - 2.0 * s_x2) * u1 + s_x2 * u2


def stein_report(inp: SteinInput, s_grid=None) -> CaseStudyReport:
    """Flat-model moments plus hyper-model averages, optionally swept over
    a grid of hypothetical sample standard deviations."""
    mean, var = flat_model_moments(inp)
    scalars = {
        "m": float(inp.m),
        "xbar": inp.xbar,
        "sample_var": inp.sample_var,
        "mean_square": inp.mean_square,
        "flat_mean_power": mean,
        "flat_mean_power_variance": var,
    }
    tables = {}
    if inp.m >= 2 and inp.sample_var > 0.0:
        scalars["averaged_mean_power"] = averaged_mean_power(inp.mean_square, inp.sample_var, inp.m)
        scalars["averaged_mean_first"] = averaged_mean(inp.x[0], inp.xbar, inp.sample_var, inp.m)
        scalars["averaged_second_moment_first"] = averaged_second_moment(
            inp.x[0], inp.xbar, inp.sample_var, inp.m)
    if s_grid is not None:
        # hypothetical sample deviations at the observed sample mean, so the
        # swept mean square is xbar^2 + s^2 rather than the observed one
        s_grid = np.asarray(s_grid, dtype=float)
        x_i, xb = inp.x[0], inp.xbar
        tables["sweep"] = {
            "s_x": s_grid,
            "averaged_mean": np.array([averaged_mean(x_i, xb, s * s, inp.m) for s in s_grid]),
            "averaged_second_moment": np.array(
                [averaged_second_moment(x_i, xb, s * s, inp.m) for s in s_grid]),
            "averaged_mean_power": np.array(
                [averaged_mean_power(xb * xb + s * s, s * s, inp.m) for s in s_grid]),
        }
    return CaseStudyReport(name="stein", inputs={"x": inp.x}, scalars=scalars,
                           tables=tables, flags={"gaussian_surrogate_prior": True})
