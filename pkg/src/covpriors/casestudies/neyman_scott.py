"""Common variance of many Gaussian pairs: resolving the inconsistent
volume-element prior by averaging over bounded-variance models.

m independent pairs share an unknown variance zeta; the sufficient
statistics are the pair means and the pooled variance s2, distributed so
that 2 m s2 / zeta is chi-square with m degrees of freedom (hence the
frequentist expectation of s2 is zeta/2).  The joint volume-element prior
on (means, zeta) is proportional to zeta^(-(m+2)/2), which concentrates at
zeta = 0 and produces the inconsistent posterior mean m s2/(m - 1) -> s2.

Bounding zeta below by a hyper-parameter zeta0 > 0 removes the hidden
claim that zeta is arbitrarily small.  Each floor value labels a model;
its evidence, the conditional posterior of zeta, the posterior over the
floor itself (volume-element hyper-prior 1/zeta0), and the model-averaged
expectation 2 m s2/(m - 2) all come out in closed form below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..specfun import log_gamma, log_lower_gamma
from .report import CaseStudyReport


@dataclass(frozen=True)
class NeymanScottInput:
    """m pairs with pooled variance s2; pair means are carried for
    completeness but every closed form depends on s2 alone."""

    m: int
    s2: float
    xbar: tuple = ()

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("need at least one pair")
        if not self.s2 > 0.0:
            raise DomainError("pooled variance must be positive")
        object.__setattr__(self, "xbar", tuple(float(v) for v in self.xbar))


def flat_model_zeta_mean(m: int, s2: float) -> float:
    """Posterior mean of zeta under the unbounded model: m s2 / (m-1)."""
    if m < 2:
        raise DomainError("the flat-model mean needs m >= 2")
    return m * s2 / (m - 1.0)


def flat_model_zeta_variance(m: int, s2: float) -> float:
    """Posterior variance under the unbounded model: mean^2 / (m-2)."""
    if m < 3:
        raise DomainError("the flat-model variance needs m >= 3")
    return flat_model_zeta_mean(m, s2) ** 2 / (m - 2.0)


def frequentist_s2_moments(m: int, zeta: float) -> tuple:
    """Sampling mean and variance of the pooled variance given zeta.

    2 m s2 / zeta is chi-square with m degrees of freedom, so the mean is
    zeta/2 (s2 is biased low by half) and the variance zeta^2 / (2 m).
    """
    if not zeta > 0.0:
        raise DomainError("zeta must be positive")
    return 0.5 * zeta, zeta * zeta / (2.0 * m)


def zeta_log_posterior_flat(m: int, s2: float, zeta) -> np.ndarray:
    """log posterior density of zeta under the unbounded model:
    (m s2)^m exp(-m s2/zeta) / (zeta^(m+1) Gamma(m))."""
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta <= 0.0):
        raise DomainError("zeta must be positive")
    ms2 = m * s2
    return m * math.log(ms2) - ms2 / zeta - (m + 1) * np.log(zeta) - log_gamma(float(m))


def log_evidence_given_floor(m: int, s2: float, zeta0) -> np.ndarray:
    """log marginal likelihood of the model with variance floor zeta0:

        m^2 sqrt(zeta0^m) gamma(m, m s2/zeta0)
        ------------------------------------------- ,
        4 sqrt(m^m) s^(m+2) Gamma(m/2 + 1)

    gamma denoting the lower incomplete gamma function.
    """
    zeta0 = np.asarray(zeta0, dtype=float)
    if np.any(zeta0 <= 0.0):
        raise DomainError("the variance floor must be positive")
    w = m * s2 / zeta0
    lg = np.array([log_lower_gamma(float(m), float(v)) for v in np.atleast_1d(w)])
    lg = lg.reshape(zeta0.shape) if zeta0.shape else float(lg[0])
    return (2.0 * math.log(m) + 0.5 * m * np.log(zeta0) + lg
            - math.log(4.0) - 0.5 * m * math.log(m)
            - 0.5 * (m + 2) * math.log(s2) - log_gamma(0.5 * m + 1.0))


def zeta_log_posterior_given_floor(m: int, s2: float, zeta, zeta0: float) -> np.ndarray:
    """log posterior of zeta in the floored model, supported on zeta > zeta0."""
    zeta = np.asarray(zeta, dtype=float)
    if not zeta0 > 0.0:
        raise DomainError("the variance floor must be positive")
    ms2 = m * s2
    out = (m * math.log(ms2) - ms2 / zeta - (m + 1) * np.log(zeta)
           - log_lower_gamma(float(m), ms2 / zeta0))
    return np.where(zeta > zeta0, out, -np.inf)


def conditional_zeta_mean(m: int, s2: float, zeta0) -> np.ndarray:
    """E(zeta | data, floor zeta0) = m s2 gamma(m-1, m s2/zeta0) / gamma(m, m s2/zeta0)."""
    if m < 2:
        raise DomainError("the conditional mean needs m >= 2")
    zeta0 = np.asarray(zeta0, dtype=float)
    if np.any(zeta0 <= 0.0):
        raise DomainError("the variance floor must be positive")
    w = np.atleast_1d(m * s2 / zeta0)
    vals = np.array([math.exp(log_lower_gamma(m - 1.0, float(v)) - log_lower_gamma(float(m), float(v)))
                     for v in w])
    vals = m * s2 * vals
    return vals.reshape(zeta0.shape) if zeta0.shape else float(vals[0])


def floor_log_posterior(m: int, s2: float, zeta0) -> np.ndarray:
    """log posterior density of the variance floor under the 1/zeta0
    hyper-prior:

        m^2 sqrt(zeta0^(m-2)) gamma(m, m s2/zeta0)
        ------------------------------------------- ,
        4 sqrt(m^m) s^m Gamma(m/2 + 1)

    normalized over zeta0 in (0, inf) for every m >= 1.
    """
    zeta0 = np.asarray(zeta0, dtype=float)
    if np.any(zeta0 <= 0.0):
        raise DomainError("the variance floor must be positive")
    w = m * s2 / zeta0
    lg = np.array([log_lower_gamma(float(m), float(v)) for v in np.atleast_1d(w)])
    lg = lg.reshape(zeta0.shape) if zeta0.shape else float(lg[0])
    return (2.0 * math.log(m) + 0.5 * (m - 2) * np.log(zeta0) + lg
            - math.log(4.0) - 0.5 * m * math.log(m)
            - 0.5 * m * math.log(s2) - log_gamma(0.5 * m + 1.0))


def averaged_zeta_mean(m: int, s2: float) -> float:
    """Conditional mean averaged over the floor posterior: 2 m s2 / (m-2).

    Tends to 2 s2, the unbiased frequentist estimate, as m grows.
    """
    if m < 3:
        raise DomainError("the averaged mean needs m >= 3")
    return 2.0 * m * s2 / (m - 2.0)


def floor_posterior_argmax(m: int, s2: float, lo: float = None, hi: float = None) -> float:
    """Location of the floor-posterior maximum, by golden-section search."""
    lo = lo if lo is not None else 1e-3 * s2
    hi = hi if hi is not None else 50.0 * s2
    phi = (math.sqrt(5.0) - 1.0) / 2.0

    def f(z):
        return -float(floor_log_posterior(m, s2, z))

    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(200):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
        if b - a < 1e-10 * s2:
            break
    return 0.5 * (a + b)


def neyman_scott_report(inp: NeymanScottInput, zeta0_grid) -> CaseStudyReport:
    """Flat-model and frequentist moments, the evidence and conditional-mean
    curves over the floor grid, the floor posterior, and the averaged mean."""
    m, s2 = inp.m, inp.s2
    if m < 3:
        raise DomainError("the report's moments need m >= 3")
    zeta0_grid = np.asarray(zeta0_grid, dtype=float)
    if zeta0_grid.ndim != 1 or np.any(zeta0_grid <= 0.0):
        raise DomainError("zeta0 grid must be a 1-D array of positive floors")
    freq_mean, freq_var = frequentist_s2_moments(m, 2.0 * s2)
    scalars = {
        "m": float(m),
        "s2": s2,
        "flat_zeta_mean": flat_model_zeta_mean(m, s2),
        "flat_zeta_variance": flat_model_zeta_variance(m, s2),
        "frequentist_s2_mean_at_2s2": freq_mean,
        "frequentist_s2_variance_at_2s2": freq_var,
        "averaged_zeta_mean": averaged_zeta_mean(m, s2),
        "floor_posterior_argmax": floor_posterior_argmax(m, s2),
    }
    log_ev = log_evidence_given_floor(m, s2, zeta0_grid)
    tables = {
        "floor_curve": {
            "zeta0": zeta0_grid,
            "log_evidence": log_ev,
            "evidence": np.exp(log_ev),
            "floor_posterior": np.exp(floor_log_posterior(m, s2, zeta0_grid)),
            "conditional_zeta_mean": conditional_zeta_mean(m, s2, zeta0_grid),
        }
    }
    return CaseStudyReport(name="neyman-scott", inputs={"m": m, "s2": s2},
                           scalars=scalars, tables=tables, flags={})
