"""What happens when seemingly irrelevant statistics are discarded.

The posterior of the common pair variance in the bounded-model analysis
depends on the pooled variance alone, which tempts one to model the pooled
variance by itself: 2 m s2 / zeta chi-square with m degrees of freedom,
volume-element prior 1/zeta.  The resulting posterior

    p(zeta | s2) = sqrt((m s2)^m) exp(-m s2/zeta) / (sqrt(zeta^(m+2)) Gamma(m/2))

has mean 2 m s2/(m-2) -- identical to the model-averaged mean of the full
analysis -- but a variance 2 mean^2/(m-4) strictly larger than the
unbounded joint model's: dropping the pair means discards information that
the joint posterior couples to zeta.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError
from ..specfun import log_gamma
from . import neyman_scott
from .report import CaseStudyReport


def zeta_log_posterior(m: int, s2: float, zeta) -> np.ndarray:
    """log posterior of zeta when only the pooled variance is modelled."""
    if m < 1 or not s2 > 0.0:
        raise DomainError("need m >= 1 and positive pooled variance")
    zeta = np.asarray(zeta, dtype=float)
    if np.any(zeta <= 0.0):
        raise DomainError("zeta must be positive")
    ms2 = m * s2
    return (0.5 * m * math.log(ms2) - ms2 / zeta - 0.5 * (m + 2) * np.log(zeta)
            - log_gamma(0.5 * m))


def posterior_mean(m: int, s2: float) -> float:
    """2 m s2 / (m - 2); needs m >= 3."""
    if m < 3:
        raise DomainError("the posterior mean needs m >= 3")
    return 2.0 * m * s2 / (m - 2.0)


def posterior_variance(m: int, s2: float) -> float:
    """2 mean^2 / (m - 4); needs m >= 5."""
    if m < 5:
        raise DomainError("the posterior variance needs m >= 5")
    return 2.0 * posterior_mean(m, s2) ** 2 / (m - 4.0)


def marginalization_report(m: int, s2: float) -> CaseStudyReport:
    """Moments of the pooled-variance-only posterior side by side with the
    unbounded joint model's, whose variance it strictly exceeds."""
    scalars = {
        "m": float(m),
        "s2": s2,
        "posterior_mean": posterior_mean(m, s2),
        "averaged_zeta_mean": neyman_scott.averaged_zeta_mean(m, s2),
        "flat_zeta_mean": neyman_scott.flat_model_zeta_mean(m, s2),
        "flat_zeta_variance": neyman_scott.flat_model_zeta_variance(m, s2),
    }
    if m >= 5:
        scalars["posterior_variance"] = posterior_variance(m, s2)
    return CaseStudyReport(name="marginalization", inputs={"m": m, "s2": s2},
                           scalars=scalars, tables={}, flags={})
