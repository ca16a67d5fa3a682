"""Closed-form case studies, each paired in the test suite with the
independent quadrature or Monte-Carlo oracle that validates it."""

from .gauss_stdmean import (
    evidence_mean_model,
    evidence_stdmean_model,
    evidence_table,
    log_evidence_mean_model,
    log_evidence_stdmean_model,
    posterior_mean_model,
    posterior_mean_model_in_stdmean_coords,
    posterior_stdmean_model,
)
from .marginalization import marginalization_report
from .multinomial import MultinomialInput, multinomial_report
from .multinormal import MultinormalInput, credible_ball_probability, multinormal_summary
from .neyman_scott import NeymanScottInput, neyman_scott_report
from .report import CaseStudyReport
from .stein import SteinInput, stein_report

__all__ = [
    "CaseStudyReport",
    "evidence_mean_model",
    "evidence_stdmean_model",
    "evidence_table",
    "log_evidence_mean_model",
    "log_evidence_stdmean_model",
    "posterior_mean_model",
    "posterior_mean_model_in_stdmean_coords",
    "posterior_stdmean_model",
    "MultinormalInput",
    "credible_ball_probability",
    "multinormal_summary",
    "MultinomialInput",
    "multinomial_report",
    "SteinInput",
    "stein_report",
    "NeymanScottInput",
    "neyman_scott_report",
    "marginalization_report",
]
