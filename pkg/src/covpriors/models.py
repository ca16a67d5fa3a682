"""Ready-made sampling models used by the test suite and the CLI.

Each constructor returns a LogDensityModel whose ``log_density`` broadcasts
over an array of data points for a fixed parameter vector, and whose
``log_density_batch`` evaluates a data array against a parameter stack.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import DataDomain, DiscreteData, LogDensityModel

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def gaussian_location(sigma: float = 1.0) -> LogDensityModel:
    """Normal data with known scale; the single parameter is the mean."""

    def log_density(x, alpha):
        mu = alpha[0]
        return -_LOG_SQRT_2PI - math.log(sigma) - (np.asarray(x) - mu) ** 2 / (2.0 * sigma * sigma)

    def log_density_batch(x, alphas):
        mu = alphas[:, 0][:, None]
        return -_LOG_SQRT_2PI - math.log(sigma) - (x[None, :] - mu) ** 2 / (2.0 * sigma * sigma)

    return LogDensityModel(
        param_dim=1, log_density=log_density, log_density_batch=log_density_batch,
        support=((-math.inf, math.inf),),
        expectation_scheme=DataDomain(), name=f"gaussian-location(sigma={sigma:g})")


def gaussian_mean_sigma() -> LogDensityModel:
    """Normal data with unknown mean and scale, parameters (mu, sigma)."""

    def log_density(x, alpha):
        mu, sigma = alpha[0], alpha[1]
        return -_LOG_SQRT_2PI - np.log(sigma) - (np.asarray(x) - mu) ** 2 / (2.0 * sigma * sigma)

    def log_density_batch(x, alphas):
        mu = alphas[:, 0][:, None]
        sigma = alphas[:, 1][:, None]
        return -_LOG_SQRT_2PI - np.log(sigma) - (x[None, :] - mu) ** 2 / (2.0 * sigma * sigma)

    return LogDensityModel(
        param_dim=2, log_density=log_density, log_density_batch=log_density_batch,
        support=((-math.inf, math.inf), (0.0, math.inf)),
        expectation_scheme=DataDomain(), name="gaussian-mean-sigma")


def gaussian_stdmean_sigma() -> LogDensityModel:
    """The same Gaussian family labelled by (mean/sigma, sigma)."""

    def log_density(x, alpha):
        lam, sigma = alpha[0], alpha[1]
        return -_LOG_SQRT_2PI - np.log(sigma) - (np.asarray(x) - lam * sigma) ** 2 / (2.0 * sigma * sigma)

    def log_density_batch(x, alphas):
        lam = alphas[:, 0][:, None]
        sigma = alphas[:, 1][:, None]
        return -_LOG_SQRT_2PI - np.log(sigma) - (x[None, :] - lam * sigma) ** 2 / (2.0 * sigma * sigma)

    return LogDensityModel(
        param_dim=2, log_density=log_density, log_density_batch=log_density_batch,
        support=((-math.inf, math.inf), (0.0, math.inf)),
        expectation_scheme=DataDomain(), name="gaussian-stdmean-sigma")


def bernoulli() -> LogDensityModel:
    """Single Bernoulli trial with success probability theta in (0, 1)."""

    def log_density(x, alpha):
        theta = alpha[0]
        x = np.asarray(x)
        return x * math.log(theta) + (1.0 - x) * math.log1p(-theta)

    def log_density_batch(x, alphas):
        theta = alphas[:, 0][:, None]
        return x[None, :] * np.log(theta) + (1.0 - x[None, :]) * np.log1p(-theta)

    return LogDensityModel(
        param_dim=1, log_density=log_density, log_density_batch=log_density_batch,
        support=((0.0, 1.0),),
        expectation_scheme=DiscreteData(points=(0.0, 1.0)), name="bernoulli")


def exponential_rate() -> LogDensityModel:
    """Exponential waiting time with rate theta > 0."""

    def log_density(x, alpha):
        theta = alpha[0]
        x = np.asarray(x)
        return np.where(x >= 0.0, math.log(theta) - theta * x, -np.inf)

    def log_density_batch(x, alphas):
        theta = alphas[:, 0][:, None]
        return np.where(x[None, :] >= 0.0, np.log(theta) - theta * x[None, :], -np.inf)

    return LogDensityModel(
        param_dim=1, log_density=log_density, log_density_batch=log_density_batch,
        support=((0.0, math.inf),),
        expectation_scheme=DataDomain(lower=0.0), name="exponential-rate")


BUILTIN_MODELS = {
    "gaussian-location": gaussian_location,
    "gaussian-mean-sigma": gaussian_mean_sigma,
    "gaussian-stdmean-sigma": gaussian_stdmean_sigma,
    "bernoulli": bernoulli,
    "exponential-rate": exponential_rate,
}
