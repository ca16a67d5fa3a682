"""How many cells does a multinomial model need?

Under the Dirichlet(1/2, ..., 1/2) volume-element prior, the posterior mean
of each cell frequency is (x_i + 1/2)/(n + m/2), which depends on the number
m of cells -- including cells where nothing was ever observed.  Treating m
as a model label and weighting models by their marginal likelihood resolves
the ambiguity: the evidence falls off like 1/m^n, so models padded with
void cells stop contributing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..specfun import log_gamma
from .report import CaseStudyReport


@dataclass(frozen=True)
class MultinomialInput:
    counts: tuple
    m_max: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts) or sum(counts) < 1:
            raise DomainError("counts must be non-negative integers with a positive total")
        object.__setattr__(self, "counts", counts)
        if self.m_max < n_nonzero(counts):
            raise DomainError(
                f"m_max={self.m_max} is below the {n_nonzero(counts)} populated cells")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def m_min(self) -> int:
        return n_nonzero(self.counts)


def n_nonzero(counts) -> int:
    return sum(1 for c in counts if c > 0)


def _check_model_size(counts, m: int) -> tuple:
    """Counts padded with void cells to m entries."""
    populated = tuple(int(c) for c in counts if c > 0)
    if m < len(populated):
        raise DomainError(
            f"a model with m={m} cells cannot hold {len(populated)} populated cells")
    return populated + (0,) * (m - len(populated))


def log_evidence(counts, m: int) -> float:
    """log marginal likelihood of the m-cell model:

        n! Gamma(m/2) prod Gamma(x_i + 1/2)
        ------------------------------------------ .
        sqrt(pi^m) Gamma(n + m/2) prod x_i!

    Void cells contribute Gamma(1/2)/sqrt(pi) = 1 apiece, so only the
    populated counts and the Gamma(m/2)/Gamma(n + m/2) ratio matter.
    """
    padded = _check_model_size(counts, m)
    n = sum(padded)
    out = log_gamma(n + 1.0) + log_gamma(0.5 * m) - log_gamma(n + 0.5 * m)
    for c in padded:
        if c > 0:
            out += log_gamma(c + 0.5) - 0.5 * math.log(math.pi) - log_gamma(c + 1.0)
    return out


def posterior_mean(counts, m: int) -> np.ndarray:
    """Posterior mean (x_i + 1/2)/(n + m/2) for every cell of the m-cell model."""
    padded = _check_model_size(counts, m)
    n = sum(padded)
    return (np.asarray(padded, dtype=float) + 0.5) / (n + 0.5 * m)


def model_weights(inp: MultinomialInput) -> dict:
    """Posterior probability of each cell count m in [m_min, m_max],
    assuming the models mutually exclusive and equiprobable."""
    ms = np.arange(inp.m_min, inp.m_max + 1)
    logz = np.array([log_evidence(inp.counts, int(m)) for m in ms])
    shifted = np.exp(logz - logz.max())
    probs = shifted / shifted.sum()
    return {"m": ms, "log_evidence": logz, "probability": probs}


def tail_slope(ms: np.ndarray, log_probs: np.ndarray, last_decade: float = 10.0) -> float:
    """Least-squares slope of log probability against log m over the last
    decade of the m range."""
    ms = np.asarray(ms, dtype=float)
    mask = ms >= ms.max() / last_decade
    if mask.sum() < 2:
        raise DomainError("not enough points in the last decade for a slope fit")
    return float(np.polyfit(np.log(ms[mask]), np.asarray(log_probs)[mask], 1)[0])


def multinomial_report(inp: MultinomialInput) -> CaseStudyReport:
    """Per-model evidences and weights plus model-averaged cell means."""
    w = model_weights(inp)
    ms, probs = w["m"], w["probability"]
    k = len(inp.counts)
    means = np.zeros(k)
    for m, p in zip(ms, probs):
        mean_m = posterior_mean(inp.counts, int(m))
        means += p * mean_m[:k]
    per_m_mean_first = np.array([posterior_mean(inp.counts, int(m))[0] for m in ms])
    log_probs = w["log_evidence"] - w["log_evidence"].max()
    log_probs = log_probs - math.log(float(np.exp(log_probs).sum()))
    slope = tail_slope(ms, log_probs)
    return CaseStudyReport(
        name="multinomial",
        inputs={"counts": inp.counts, "m_max": inp.m_max},
        scalars={
            "n": float(inp.n),
            "m_min": float(inp.m_min),
            "tail_slope": slope,
            **{f"averaged_mean_cell_{i + 1}": float(v) for i, v in enumerate(means)},
        },
        tables={
            "models": {"m": ms, "log_evidence": w["log_evidence"],
                       "probability": probs, "posterior_mean_cell_1": per_m_mean_first},
        },
        flags={},
    )
