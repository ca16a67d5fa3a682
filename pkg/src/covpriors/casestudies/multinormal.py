"""Repeated Gaussian measurements of several measurands with a common
unknown scale.

With m measurands, n repetitions each, sample means xbar_i and pooled
biased variance s2, the volume-element prior on (mu_1..mu_m, sigma) is
m sigma0^m / (V_mu sigma^(m+1)) on sigma > sigma0 and a mu box of volume
V_mu.  Extending the integration domain to the full half-space gives the
evidence in closed form up to that extension (flagged "approximate_domain");
the sigma0/V_mu prefactor is carried as an explicit separate factor because
it cancels from every posterior quantity.

The joint posterior of any q of the m means is a q-variate scaled Student
distribution with mn degrees of freedom whose per-coordinate variance
m s2/(mn - 2) does not depend on q; what does depend on q is the
probability that all q means fall inside the one-standard-deviation ball,
which ``credible_ball_probability`` evaluates in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..specfun import hyp2f1, log_gamma
from .report import CaseStudyReport


@dataclass(frozen=True)
class MultinormalInput:
    m: int
    n: int
    pooled_s2: float
    xbar: tuple = ()
    q: int = 1
    sigma0: float = 1.0
    v_mu: float = 1.0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DomainError("need m >= 1 measurands and n >= 1 repetitions")
        if not self.pooled_s2 > 0.0:
            raise DomainError("pooled variance must be positive")
        if not (1 <= self.q <= self.m):
            raise DomainError(f"subset size q={self.q} must lie in [1, m={self.m}]")
        if not (self.sigma0 > 0.0 and self.v_mu > 0.0):
            raise DomainError("sigma0 and v_mu must be positive")
        xbar = tuple(float(v) for v in self.xbar) or tuple(0.0 for _ in range(self.m))
        if len(xbar) != self.m:
            raise DomainError(f"xbar has {len(xbar)} entries for m={self.m}")
        object.__setattr__(self, "xbar", xbar)


def log_evidence_base(m: int, n: int, pooled_s2: float) -> float:
    """log of the domain-extended evidence without the sigma0/V_mu prefactor:

        sqrt((2m)^m) Gamma(mn/2) / (2 sqrt((mn)^(m(n+1)) pi^(m(n-1))) s^(mn)).
    """
    mn = m * n
    return (0.5 * m * math.log(2.0 * m) + log_gamma(0.5 * mn) - math.log(2.0)
            - 0.5 * (m * (n + 1) * math.log(mn) + m * (n - 1) * math.log(math.pi))
            - 0.5 * mn * math.log(pooled_s2))


def log_prefactor(m: int, sigma0: float, v_mu: float) -> float:
    """log of the m sigma0^m / V_mu factor shared by prior and evidence."""
    return math.log(m) + m * math.log(sigma0) - math.log(v_mu)


def subset_posterior_log_density(inp: MultinormalInput, mu_prime) -> np.ndarray:
    """Joint posterior log density of the first q means.

    mu_prime has shape (..., q).  The density is the scaled q-variate
    Student form with mn degrees of freedom, location xbar' and squared
    scale m s2 per coordinate.
    """
    mu_prime = np.atleast_2d(np.asarray(mu_prime, dtype=float))
    q, mn = inp.q, inp.m * inp.n
    loc = np.asarray(inp.xbar[:q])
    t2 = np.sum((mu_prime - loc) ** 2, axis=-1) / (inp.m * inp.pooled_s2)
    return (log_gamma(0.5 * (mn + q)) - log_gamma(0.5 * mn)
            - 0.5 * q * (math.log(inp.m * math.pi) + math.log(inp.pooled_s2))
            - 0.5 * (mn + q) * np.log1p(t2))


def credible_ball_probability(q: int, mn: int) -> float:
    """Probability that q jointly estimated means lie inside the ball of
    one per-coordinate standard deviation around their posterior location:

                   Gamma((mn+q)/2)
        ------------------------------------------  2F1(q/2, (mn+q)/2; (q+2)/2; 1/(2-mn)).
        sqrt((mn-2)^q) Gamma(mn/2) Gamma((q+2)/2)

    Obtained by reducing the q-variate Student ball integral to its radial
    part and applying the incomplete-beta / hypergeometric identity
    int_0^z u^(b-1) (1+u)^(-s) du = (z^b / b) 2F1(s, b; b+1; -z).  Strictly
    decreases toward zero as q grows, even though the per-coordinate
    variance does not depend on q.
    """
    if q < 1 or q != int(q):
        raise DomainError(f"need an integer subset size q >= 1, got {q!r}")
    if mn < 3 or mn != int(mn):
        raise DomainError(f"need integer degrees of freedom mn >= 3, got {mn!r}")
    log_front = (log_gamma(0.5 * (mn + q)) - 0.5 * q * math.log(mn - 2.0)
                 - log_gamma(0.5 * mn) - log_gamma(0.5 * (q + 2)))
    series = hyp2f1(0.5 * q, 0.5 * (mn + q), 0.5 * (q + 2), 1.0 / (2.0 - mn))
    p = math.exp(log_front) * series
    if not 0.0 < p < 1.0:
        raise DomainError(f"credible-ball probability {p!r} escaped (0, 1); q={q}, mn={mn}")
    return p


def multinormal_summary(inp: MultinormalInput, *, require_moments: bool = False) -> CaseStudyReport:
    """Evidence, subset-posterior location/scale, and the credible-ball
    probability for the requested subset size.

    The evidence exists for any mn >= 1; the posterior moments and the
    credible-ball probabilities need mn > 2 and are omitted (with the
    ``moments_undefined`` flag set) otherwise, unless ``require_moments``
    turns the omission into an error.
    """
    mn = inp.m * inp.n
    if require_moments and mn <= 2:
        raise DomainError(f"posterior moments need mn > 2, got mn = {mn}")
    log_base = log_evidence_base(inp.m, inp.n, inp.pooled_s2)
    log_pref = log_prefactor(inp.m, inp.sigma0, inp.v_mu)
    scalars = {
        "log_evidence": log_base + log_pref,
        "evidence": math.exp(log_base + log_pref),
        "log_evidence_base": log_base,
        "log_prefactor": log_pref,
        "degrees_of_freedom": float(mn),
    }
    tables = {
        "subset_location": {"coordinate": np.arange(1, inp.q + 1),
                            "location": np.asarray(inp.xbar[:inp.q])},
    }
    flags = {"approximate_domain": True}
    if mn > 2:
        var = inp.m * inp.pooled_s2 / (mn - 2.0)
        qs = np.arange(1, inp.m + 1)
        ball = np.array([credible_ball_probability(int(q), mn) for q in qs])
        scalars.update({
            "posterior_variance_per_coordinate": var,
            "posterior_sd_per_coordinate": math.sqrt(var),
            "credible_ball_probability_q": float(ball[inp.q - 1]),
        })
        tables["credible_ball"] = {"q": qs, "probability": ball}
    else:
        flags["moments_undefined"] = True
    return CaseStudyReport(
        name="multinormal",
        inputs={"m": inp.m, "n": inp.n, "pooled_s2": inp.pooled_s2, "q": inp.q,
                "sigma0": inp.sigma0, "v_mu": inp.v_mu},
        scalars=scalars, tables=tables, flags=flags,
    )
