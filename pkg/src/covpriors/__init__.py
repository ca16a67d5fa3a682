"""Covariant priors from the information metric, marginal-likelihood model
selection and averaging, and the classic paradox case studies, each paired
with independent numerical oracles."""

__version__ = "0.1.0"
