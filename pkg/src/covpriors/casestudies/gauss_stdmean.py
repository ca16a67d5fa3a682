"""Gaussian sample with standardized statistics, analysed under two
reference priors tailored to different measurand pairs.

The data convention: n observations whose sample mean is 0 and whose biased
standard deviation is 1, so the joint likelihood of (mu, sigma) is

    (2 pi)^(-n/2) sigma^(-n) exp[-n (1 + mu^2) / (2 sigma^2)].

The "mean model" carries the reference prior 1/sigma for the measurand pair
(mu, sigma); the "stdmean model" relabels the family by the standardized
mean lambda = mu/sigma and carries the reference prior
1/(sqrt(2 + lambda^2) sigma).  Both priors are improper, so both marginal
likelihoods are defined only up to a constant and the Evidence objects are
flagged accordingly.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..inference import Evidence
from ..specfun import bessel_k0, log_gamma

_LOG_2PI = math.log(2.0 * math.pi)


def _check_n(n: int) -> int:
    if n < 2 or n != int(n):
        raise DomainError(f"need an integer sample size n >= 2, got {n!r}")
    return int(n)


def log_likelihood(n: int, mu, sigma):
    """Joint log likelihood of (mu, sigma) for standardized data."""
    n = _check_n(n)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    return -0.5 * n * _LOG_2PI - n * np.log(sigma) - n * (1.0 + mu * mu) / (2.0 * sigma * sigma)


def log_prior_mean_model(mu, sigma):
    """Reference prior for the (mu, sigma) measurand pair: 1/sigma."""
    return -np.log(np.asarray(sigma, dtype=float))


def log_prior_stdmean_model(lam, sigma):
    """Reference prior for the (lambda, sigma) pair: 1/(sqrt(2+lambda^2) sigma)."""
    lam = np.asarray(lam, dtype=float)
    return -0.5 * np.log(2.0 + lam * lam) - np.log(np.asarray(sigma, dtype=float))


def log_evidence_mean_model(n: int) -> float:
    """log of Gamma((n-1)/2) / (2 sqrt(n^n pi^(n-1)))."""
    n = _check_n(n)
    return log_gamma(0.5 * (n - 1)) - math.log(2.0) - 0.5 * (n * math.log(n) + (n - 1) * math.log(math.pi))


def log_evidence_stdmean_model(n: int) -> float:
    """log of K0(n/2) Gamma(n/2 + 1) e^(n/2) / (n sqrt((n pi)^n))."""
    n = _check_n(n)
    return (math.log(bessel_k0(0.5 * n)) + log_gamma(0.5 * n + 1.0) + 0.5 * n
            - math.log(n) - 0.5 * n * (math.log(n) + math.log(math.pi)))


def evidence_mean_model(n: int) -> Evidence:
    """Marginal likelihood under the 1/sigma prior, up to a constant."""
    return Evidence(log_value=log_evidence_mean_model(n), up_to_constant=True)


def evidence_stdmean_model(n: int) -> Evidence:
    """Marginal likelihood under the standardized-mean prior, up to a constant."""
    return Evidence(log_value=log_evidence_stdmean_model(n), up_to_constant=True)


def posterior_mean_model(n: int, mu, sigma):
    """Joint posterior density of (mu, sigma) under the 1/sigma prior.

    Closed form; integrates to one over R x R+.
    """
    n = _check_n(n)
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise DomainError("sigma must be positive")
    log_norm = (0.5 * n * math.log(n) - 0.5 * ((n - 2) * math.log(2.0) + math.log(math.pi))
                - log_gamma(0.5 * (n - 1)))
    return np.exp(log_norm - (n + 1) * np.log(sigma) - n * (1.0 + mu * mu) / (2.0 * sigma * sigma))


def posterior_stdmean_model(n: int, lam, sigma):
    """Joint posterior density of (lambda, sigma) under its reference prior.

    Evaluated directly as likelihood times prior over the closed-form
    marginal likelihood, which keeps the density exactly normalized.
    """
    n = _check_n(n)
    lam = np.asarray(lam, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise DomainError("sigma must be positive")
    log_post = (log_likelihood(n, lam * sigma, sigma)
                + log_prior_stdmean_model(lam, sigma)
                - log_evidence_stdmean_model(n))
    return np.exp(log_post)


def posterior_mean_model_in_stdmean_coords(n: int, lam, sigma):
    """The (mu, sigma) posterior pushed to (lambda, sigma) coordinates.

    Change of variables mu = lambda sigma contributes a jacobian factor of
    sigma.  Comparing this with ``posterior_stdmean_model`` exhibits the
    inconsistency of the two non-covariant priors: same data, same sampling
    family, different posteriors.
    """
    sigma_arr = np.asarray(sigma, dtype=float)
    return posterior_mean_model(n, np.asarray(lam, dtype=float) * sigma_arr, sigma_arr) * sigma_arr


def evidence_table(n_min: int, n_max: int):
    """Columns (n, both log evidences and evidences) for a sample-size sweep."""
    if n_min < 2 or n_max < n_min:
        raise DomainError("need 2 <= n_min <= n_max")
    ns = np.arange(n_min, n_max + 1)
    log_mean = np.array([log_evidence_mean_model(int(n)) for n in ns])
    log_std = np.array([log_evidence_stdmean_model(int(n)) for n in ns])
    return {
        "n": ns,
        "log_evidence_mean_prior": log_mean,
        "log_evidence_stdmean_prior": log_std,
        "evidence_mean_prior": np.exp(log_mean),
        "evidence_stdmean_prior": np.exp(log_std),
    }
