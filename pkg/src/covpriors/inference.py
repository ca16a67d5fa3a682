"""Generic Bayes machinery.

Gridded posteriors with their normalizing constants, marginal likelihoods
over declared supports (with explicit bookkeeping for improper priors),
posterior model probabilities, and model averaging.  Everything accumulates
in log space with max-shift normalization so that evidences far below the
double-precision floor remain usable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DivergentIntegralError,
    DomainError,
    EmptySupportError,
    IncomparableEvidenceError,
    MassLeakWarning,
)
from .geometry import LogDensityModel, log_density_many
from .oracle import IntegrationSpec, integrate_nd

__all__ = [
    "Evidence",
    "ParameterGrid",
    "GriddedPosterior",
    "ModelEnsemble",
    "ModelPosterior",
    "posterior_on_grid",
    "marginal_likelihood",
    "model_posterior",
    "model_average",
    "log_sum_exp",
]


def log_sum_exp(log_terms: np.ndarray) -> float:
    log_terms = np.asarray(log_terms, dtype=float)
    m = np.max(log_terms)
    if not np.isfinite(m):
        return float(m)
    return float(m + np.log(np.sum(np.exp(log_terms - m))))


@dataclass(frozen=True)
class Evidence:
    """A marginal likelihood.

    ``up_to_constant`` marks values obtained from an improper prior; they
    are defined only up to an arbitrary positive factor and refuse to enter
    model comparison.
    """

    log_value: float
    up_to_constant: bool = False

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    def scaled(self, log_factor: float) -> "Evidence":
        return Evidence(self.log_value + log_factor, self.up_to_constant)


@dataclass(frozen=True)
class ParameterGrid:
    """Tensor-product grid with quadrature weights.

    Axes with an odd point count get composite-Simpson weights (grids of
    2^k + 1 points nest under refinement); even counts fall back to the
    trapezoid rule.
    """

    axes: tuple

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        for a in axes:
            if a.ndim != 1 or a.size < 3:
                raise DomainError("each grid axis needs at least 3 points")
            if not np.all(np.diff(a) > 0):
                raise DomainError("grid axes must be strictly increasing")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def regular(cls, bounds: Sequence, points_per_dim: int = 257) -> "ParameterGrid":
        return cls(tuple(np.linspace(lo, hi, points_per_dim) for lo, hi in bounds))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(a.size for a in self.axes)

    def points(self) -> np.ndarray:
        """All grid points as a (N, ndim) array in C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def _axis_weights(self, a: np.ndarray) -> np.ndarray:
        n = a.size
        h = np.diff(a)
        if n % 2 == 1 and np.allclose(h, h[0], rtol=1e-9):
            w = np.ones(n)
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            return w * h[0] / 3.0
        w = np.zeros(n)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        return w

    def weights(self) -> np.ndarray:
        """Per-point quadrature weights (flattened, C order)."""
        w = self._axis_weights(self.axes[0])
        for a in self.axes[1:]:
            w = np.multiply.outer(w, self._axis_weights(a))
        return w.ravel()

    def boundary_mask(self) -> np.ndarray:
        masks = []
        for a in self.axes:
            m = np.zeros(a.size, dtype=bool)
            m[0] = m[-1] = True
            masks.append(m)
        out = np.zeros(self.shape, dtype=bool)
        for dim, m in enumerate(masks):
            shape = [1] * len(masks)
            shape[dim] = -1
            out |= m.reshape(shape)
        return out.ravel()


@dataclass(frozen=True)
class GriddedPosterior:
    grid: ParameterGrid
    log_unnorm: np.ndarray
    log_evidence: float
    up_to_constant: bool = False

    def probabilities(self) -> np.ndarray:
        """Per-cell posterior probabilities (they sum to one)."""
        return np.exp(self.log_unnorm - self.log_evidence) * self.grid.weights()

    def densities(self) -> np.ndarray:
        return np.exp(self.log_unnorm - self.log_evidence)

    def mean(self) -> np.ndarray:
        pts = self.grid.points()
        return self.probabilities() @ pts

    def variance(self) -> np.ndarray:
        pts = self.grid.points()
        mu = self.mean()
        return self.probabilities() @ (pts - mu) ** 2

    @property
    def evidence(self) -> Evidence:
        return Evidence(self.log_evidence, self.up_to_constant)


def eval_log_density_many(model: LogDensityModel, x, alphas: np.ndarray) -> np.ndarray:
    """log density of one data point at many parameter vectors, (N,)."""
    return log_density_many(model, np.array([x]), alphas)[:, 0]


def _eval_log_prior_many(log_prior, alphas: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(log_prior(alphas), dtype=float)
        if vals.shape == (alphas.shape[0],):
            return vals
    except Exception:  # noqa: BLE001 - fall back to the scalar contract
        pass
    return np.array([float(log_prior(a)) for a in alphas])


def posterior_on_grid(model: LogDensityModel, log_prior, data, grid: ParameterGrid,
                      *, up_to_constant: bool = False,
                      boundary_mass_tol: float = 1e-4) -> GriddedPosterior:
    """Posterior of the model parameters on a fixed grid.

    The evidence comes from the same grid quadrature.  Issues a
    MassLeakWarning when the boundary cells carry more than
    ``boundary_mass_tol`` of the posterior mass, and raises
    EmptySupportError when the posterior vanishes everywhere.
    """
    if grid.ndim != model.param_dim:
        raise DomainError(f"grid dimension {grid.ndim} != param_dim {model.param_dim}")
    alphas = grid.points()
    data = np.atleast_1d(np.asarray(data, dtype=float))
    log_post = _eval_log_prior_many(log_prior, alphas)
    for x in data:
        log_post = log_post + eval_log_density_many(model, x, alphas)
    if not np.any(np.isfinite(log_post)):
        raise EmptySupportError("posterior is zero at every grid point")
    log_w = np.log(grid.weights())
    log_evidence = log_sum_exp(log_post + log_w)
    post = GriddedPosterior(grid=grid, log_unnorm=log_post, log_evidence=log_evidence,
                            up_to_constant=up_to_constant)
    boundary_mass = float(post.probabilities()[grid.boundary_mask()].sum())
    if boundary_mass > boundary_mass_tol:
        warnings.warn(
            f"boundary cells carry {boundary_mass:.2e} of the posterior mass; "
            f"the grid probably truncates the distribution", MassLeakWarning,
            stacklevel=2)
    return post


def marginal_likelihood(model: LogDensityModel, log_prior, data,
                        spec: IntegrationSpec | None = None,
                        *, support: Sequence | None = None,
                        proportional: bool = False) -> Evidence:
    """Integral of likelihood times prior over the parameter support.

    With ``proportional=True`` the prior may be improper; the result is then
    flagged as defined only up to a constant.  Supports of dimension one or
    two integrate by adaptive quadrature.
    """
    spec = spec or IntegrationSpec()
    bounds = tuple(support) if support is not None else model.support
    data = np.atleast_1d(np.asarray(data, dtype=float))
    dim = len(bounds)
    if dim > 2:
        raise DomainError("marginal_likelihood supports one- or two-dimensional parameters")
    if any(not lo < hi for lo, hi in bounds):
        raise EmptySupportError(f"support {bounds!r} has zero width; the evidence is zero")

    def log_joint(*coords):
        alpha_cols = [np.asarray(c, dtype=float) for c in coords]
        shape = np.broadcast_shapes(*(c.shape for c in alpha_cols))
        flat = np.stack([np.broadcast_to(c, shape).ravel() for c in alpha_cols], axis=-1)
        vals = _eval_log_prior_many(log_prior, flat)
        for x in data:
            vals = vals + eval_log_density_many(model, x, flat)
        return vals.reshape(shape)

    try:
        est = integrate_nd(log_joint, bounds, spec, log_integrand=True)
    except Exception as exc:
        raise DivergentIntegralError(f"marginal likelihood did not converge: {exc}") from exc
    if est.log_value is None or not np.isfinite(est.log_value):
        raise EmptySupportError("marginal likelihood is zero over the declared support")
    return Evidence(log_value=est.log_value, up_to_constant=proportional)


@dataclass(frozen=True)
class ModelEnsemble:
    """Discrete family of candidate models with prior weights.

    ``members`` maps label -> evidence evaluator; an evaluator is either an
    Evidence or a callable data -> Evidence.  Prior weights default to
    equiprobable and must sum to one.
    """

    members: dict
    prior_weights: dict | None = None

    def __post_init__(self):
        labels = list(self.members)
        if len(set(labels)) != len(labels):
            raise DomainError("ensemble labels must be unique")
        if self.prior_weights is None:
            object.__setattr__(self, "prior_weights", {k: 1.0 / len(labels) for k in labels})
        else:
            w = dict(self.prior_weights)
            if set(w) != set(labels):
                raise DomainError("prior_weights labels do not match members")
            total = sum(w.values())
            if any(v < 0 for v in w.values()) or abs(total - 1.0) > 1e-9:
                raise DomainError("prior weights must be non-negative and sum to one")
            object.__setattr__(self, "prior_weights", w)


@dataclass(frozen=True)
class ModelPosterior:
    """Posterior model probabilities keyed by label."""

    weights: dict

    def __post_init__(self):
        w = dict(self.weights)
        if any(v < 0 for v in w.values()):
            raise DomainError("model probabilities must be non-negative")
        if abs(sum(w.values()) - 1.0) > 1e-10:
            raise DomainError("model probabilities must sum to one")
        object.__setattr__(self, "weights", w)

    def __getitem__(self, label):
        return self.weights[label]

    def labels(self):
        return list(self.weights)


def model_posterior(ensemble: ModelEnsemble, data=None) -> ModelPosterior:
    """Posterior odds on each ensemble member explaining the data.

    Weights are proportional to evidence times prior weight.  Any evidence
    flagged up-to-constant aborts the comparison: with an improper prior the
    overall factor is arbitrary, so the odds would be meaningless.
    """
    logs = {}
    for label, member in ensemble.members.items():
        ev = member(data) if callable(member) else member
        if not isinstance(ev, Evidence):
            ev = Evidence(log_value=math.log(ev)) if ev > 0 else Evidence(log_value=-math.inf)
        if ev.up_to_constant:
            raise IncomparableEvidenceError(
                f"evidence of model {label!r} is defined only up to a constant "
                f"(improper prior); posterior model odds are meaningless")
        prior = ensemble.prior_weights[label]
        logs[label] = (ev.log_value + math.log(prior)) if prior > 0 else -math.inf
    vals = np.array(list(logs.values()))
    if not np.any(np.isfinite(vals)):
        raise EmptySupportError("all model evidences vanish; no posterior exists")
    total = log_sum_exp(vals)
    return ModelPosterior(weights={k: math.exp(v - total) for k, v in logs.items()})


def model_average(summaries, weights: ModelPosterior):
    """Mixture of per-model summaries under posterior model weights.

    ``summaries`` maps label -> summary.  Numeric summaries (scalars or
    same-shape arrays) return their weighted sum; callable summaries
    (densities) return a mixture callable.
    """
    if set(summaries) != set(weights.weights):
        raise DomainError("summary labels do not match the model posterior")
    items = list(summaries.items())
    if all(callable(s) for _, s in items):
        def mixture(x):
            x = np.asarray(x, dtype=float)
            out = np.zeros_like(x, dtype=float)
            for label, f in items:
                out = out + weights[label] * np.asarray(f(x), dtype=float)
            return out

        return mixture
    arrays = []
    shape = None
    for label, s in items:
        a = np.asarray(s, dtype=float)
        if shape is None:
            shape = a.shape
        elif a.shape != shape:
            raise DomainError(f"summary for {label!r} has shape {a.shape}, expected {shape}")
        arrays.append(weights[label] * a)
    out = np.sum(arrays, axis=0)
    return float(out) if out.ndim == 0 else out
