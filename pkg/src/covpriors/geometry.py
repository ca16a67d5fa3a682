"""Information-geometry engine.

A parametric sampling model is a point set on a statistical manifold; the
Fisher information supplies its metric tensor.  This module computes that
metric numerically for arbitrary user-supplied models (finite differences
on the parameter, quadrature or exact summation over the data space),
together with the induced volume-element prior density, the squared
Hellinger distance, the Kullback-Leibler divergence, and the machinery for
reparameterizing a model through a one-to-one coordinate change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DegenerateMetricError, DomainError
from .oracle import IntegrationSpec
from .oracle.quadrature import _adaptive, _clean_log, map_to_finite

__all__ = [
    "DataDomain",
    "DiscreteData",
    "SampledData",
    "LogDensityModel",
    "FisherMatrix",
    "Reparameterization",
    "expectation",
    "log_density_many",
    "fisher_information",
    "fisher_information_batch",
    "jeffreys_log_density",
    "jeffreys_log_density_batch",
    "hellinger_sq_distance",
    "kl_divergence",
    "reparameterize",
]


@dataclass(frozen=True)
class DataDomain:
    """Continuous scalar data space; expectations by adaptive quadrature."""

    lower: float = -math.inf
    upper: float = math.inf


@dataclass(frozen=True)
class DiscreteData:
    """Finite data space; expectations are exact sums."""

    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))


@dataclass(frozen=True)
class SampledData:
    """Data space reachable only through sampling; expectations are
    Monte-Carlo averages.  ``sampler(rng, n, alpha)`` must return draws
    with the leading axis indexing the sample."""

    sampler: Callable


@dataclass(frozen=True)
class LogDensityModel:
    """A parametric sampling model.

    ``log_density(x, alpha)`` evaluates the log density of one data point;
    implementations should broadcast over an array of data points.  The
    parameter support is a box of per-coordinate intervals, open at any
    bound where the density or metric degenerates.

    ``log_density_batch(x, alphas)``, when provided, evaluates a (nx,) data
    array against an (N, p) parameter stack in one call, returning (N, nx);
    grid posteriors and metric sweeps use it to avoid Python-level loops.
    """

    param_dim: int
    log_density: Callable
    support: tuple
    expectation_scheme: DataDomain | DiscreteData | SampledData = field(default_factory=DataDomain)
    log_density_batch: Callable | None = None
    name: str = ""

    def __post_init__(self):
        support = tuple((float(lo), float(hi)) for lo, hi in self.support)
        if len(support) != self.param_dim:
            raise DomainError(
                f"support has {len(support)} intervals for param_dim={self.param_dim}")
        for lo, hi in support:
            if not lo < hi:
                raise DomainError(f"empty support interval ({lo!r}, {hi!r})")
        object.__setattr__(self, "support", support)

    def in_support(self, alpha) -> bool:
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        if alpha.shape != (self.param_dim,):
            return False
        return all(lo < a < hi for a, (lo, hi) in zip(alpha, self.support))

    def require_in_support(self, alpha) -> np.ndarray:
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        if not self.in_support(alpha):
            raise DomainError(f"parameter {alpha!r} outside support {self.support!r} "
                              f"of model {self.name or '<anonymous>'}")
        return alpha


@dataclass(frozen=True)
class FisherMatrix:
    """Fisher information matrix at a parameter point."""

    at_param: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))
        object.__setattr__(self, "at_param", np.atleast_1d(np.asarray(self.at_param, dtype=float)))
        scale = max(1.0, float(np.trace(self.matrix)) / m.shape[0])
        if np.linalg.eigvalsh(self.matrix).min() < -1e-8 * scale:
            raise ConvergenceError(
                f"Fisher matrix at {self.at_param!r} is not positive semidefinite "
                f"within numerical noise: {self.matrix!r}")

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True)
class Reparameterization:
    """One-to-one coordinate change beta(alpha) with its inverse.

    ``jacobian(beta)`` returns the matrix of d alpha / d beta; when omitted
    it is approximated by central differences on the inverse map.
    ``inverse_batch``, when provided, maps an (N, p) stack of beta rows to
    the matching alpha stack and lets reparameterized models keep a fast
    batched density path.
    """

    forward: Callable
    inverse: Callable
    jacobian: Callable | None = None
    inverse_batch: Callable | None = None

    def jacobian_at(self, beta) -> np.ndarray:
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        if self.jacobian is not None:
            return np.atleast_2d(np.asarray(self.jacobian(beta), dtype=float))
        p = beta.size
        jac = np.empty((p, p))
        for j in range(p):
            h = 1e-6 * max(1.0, abs(beta[j]))
            e = np.zeros(p)
            e[j] = h
            hi = np.atleast_1d(np.asarray(self.inverse(beta + e), dtype=float))
            lo = np.atleast_1d(np.asarray(self.inverse(beta - e), dtype=float))
            jac[:, j] = (hi - lo) / (2.0 * h)
        return jac


def log_density_many(model: LogDensityModel, x: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """log density of a (nx,) data array at an (N, p) parameter stack, (N, nx)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    if model.log_density_batch is not None:
        out = np.asarray(model.log_density_batch(x, alphas), dtype=float)
        if out.shape != (alphas.shape[0], x.size):
            raise DomainError(
                f"log_density_batch returned shape {out.shape}, expected "
                f"{(alphas.shape[0], x.size)}")
        return out
    return np.stack([np.asarray(model.log_density(x, a), dtype=float) for a in alphas])


def _vector_expectation(model: LogDensityModel, h, alpha: np.ndarray,
                        spec: IntegrationSpec) -> np.ndarray:
    """E[h(x)] under p(.|alpha) for a batched observable.

    ``h(x)`` maps a (n,) data array to a (batch, n) array; the return value
    has shape (batch,).
    """
    scheme = model.expectation_scheme
    if isinstance(scheme, DiscreteData):
        xs = np.asarray(scheme.points)
        w = np.exp(np.asarray(model.log_density(xs, alpha), dtype=float))
        return np.asarray(h(xs), dtype=float) @ w
    if isinstance(scheme, SampledData):
        n = max(2, min(spec.max_evals, 200_000))
        rng = np.random.Generator(np.random.Philox(key=spec.seed))
        draws = np.asarray(scheme.sampler(rng, n, alpha))
        return np.asarray(h(draws), dtype=float).mean(axis=-1)
    t_lo, t_hi, x_of, ljac = map_to_finite(scheme.lower, scheme.upper)

    def integrand(t):
        x = x_of(t)
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            logw = _clean_log(np.asarray(model.log_density(x, alpha), dtype=float) + ljac(t))
            vals = np.asarray(h(x), dtype=float) * np.exp(logw)
        return np.where(np.isfinite(vals), vals, 0.0)

    try:
        val, _, _ = _adaptive(integrand, t_lo, t_hi, spec.rel_tol, spec.abs_tol,
                              spec.max_evals, batch_floor_frac=spec.rel_tol / 100.0)
    except Exception as exc:  # noqa: BLE001 - annotate with context
        raise ConvergenceError(
            f"expectation under model {model.name or '<anonymous>'} at "
            f"{alpha!r} did not converge: {exc}") from exc
    return val


def expectation(model: LogDensityModel, h, alpha, spec: IntegrationSpec | None = None) -> float:
    """E[h(x)] under p(.|alpha) for a scalar observable."""
    spec = spec or IntegrationSpec()
    alpha = model.require_in_support(alpha)
    val = _vector_expectation(model, lambda x: np.asarray(h(x), dtype=float)[None, :], alpha, spec)
    return float(val[0])


def _param_steps(alpha: np.ndarray, step_scale: float) -> np.ndarray:
    return step_scale * np.maximum(1.0, np.abs(alpha))


def _logdens_shifted(model, x, alpha, delta):
    return np.asarray(model.log_density(x, alpha + delta), dtype=float)


def fisher_information(model: LogDensityModel, alpha, spec: IntegrationSpec | None = None,
                       *, form: str = "hessian", step_scale: float = 1e-4) -> FisherMatrix:
    """Fisher information matrix at ``alpha``.

    ``form="hessian"`` computes -E[second derivatives of the log density];
    ``form="score"`` computes E[outer product of first derivatives].  Both
    use central differences with per-coordinate step
    step_scale * max(1, |alpha_j|) and symmetrize the result.
    """
    spec = spec or IntegrationSpec()
    alpha = model.require_in_support(alpha)
    p = model.param_dim
    h = _param_steps(alpha, step_scale)
    eye = np.eye(p)

    if form == "score":
        def observable(x):
            scores = []
            for j in range(p):
                d = h[j] * eye[j]
                scores.append((_logdens_shifted(model, x, alpha, d)
                               - _logdens_shifted(model, x, alpha, -d)) / (2.0 * h[j]))
            rows = []
            for j in range(p):
                for k in range(j, p):
                    rows.append(scores[j] * scores[k])
            return np.stack(rows)
    elif form == "hessian":
        def observable(x):
            f0 = _logdens_shifted(model, x, alpha, np.zeros(p))
            rows = []
            for j in range(p):
                for k in range(j, p):
                    if j == k:
                        d = h[j] * eye[j]
                        sec = (_logdens_shifted(model, x, alpha, d) - 2.0 * f0
                               + _logdens_shifted(model, x, alpha, -d)) / (h[j] * h[j])
                    else:
                        dj = h[j] * eye[j]
                        dk = h[k] * eye[k]
                        sec = (_logdens_shifted(model, x, alpha, dj + dk)
                               - _logdens_shifted(model, x, alpha, dj - dk)
                               - _logdens_shifted(model, x, alpha, -dj + dk)
                               + _logdens_shifted(model, x, alpha, -dj - dk)) / (4.0 * h[j] * h[k])
                    rows.append(-sec)
            return np.stack(rows)
    else:
        raise DomainError(f"unknown Fisher form {form!r}; expected 'hessian' or 'score'")

    # Finite differences put a roundoff floor of order eps/h (score) or
    # eps/h^2 (hessian) on the integrand; demanding quadrature accuracy
    # below that floor only burns the evaluation budget on noise.
    eps = np.finfo(float).eps
    h_min = float(h.min())
    noise = 20.0 * eps / (h_min * h_min if form == "hessian" else h_min)
    eff_spec = spec
    if spec.rel_tol < noise:
        from dataclasses import replace as _replace

        eff_spec = _replace(spec, rel_tol=noise, abs_tol=max(spec.abs_tol, noise * 1e-4))

    vals = _vector_expectation(model, observable, alpha, eff_spec)
    mat = np.empty((p, p))
    idx = 0
    for j in range(p):
        for k in range(j, p):
            mat[j, k] = mat[k, j] = vals[idx]
            idx += 1
    return FisherMatrix(at_param=alpha, matrix=mat)


def jeffreys_log_density(model: LogDensityModel, alpha, spec: IntegrationSpec | None = None,
                         *, form: str = "hessian", step_scale: float = 1e-4) -> float:
    """Unnormalized log of the volume-element prior: 0.5 log det J(alpha).

    Normalization over a finite support is the caller's business; leaving
    it out keeps improper cases representable.  Raises DegenerateMetricError
    where the metric determinant vanishes within tolerance.
    """
    fim = fisher_information(model, alpha, spec, form=form, step_scale=step_scale)
    det = fim.det
    p = model.param_dim
    scale = (max(float(np.trace(fim.matrix)) / p, 0.0)) ** p
    if det <= 1e-12 * scale:
        raise DegenerateMetricError(
            f"Fisher determinant {det!r} at {alpha!r} is degenerate "
            f"(threshold {1e-12 * scale!r})")
    return 0.5 * math.log(det)


def _data_integral(model: LogDensityModel, f, spec: IntegrationSpec) -> float:
    """Integral (or exact sum) of f(x) over the model's data space."""
    scheme = model.expectation_scheme
    if isinstance(scheme, DiscreteData):
        xs = np.asarray(scheme.points)
        return float(np.sum(np.asarray(f(xs), dtype=float)))
    if isinstance(scheme, SampledData):
        raise DomainError("data-space integrals need a quadrature domain, not a sampler")
    t_lo, t_hi, x_of, ljac = map_to_finite(scheme.lower, scheme.upper)

    def integrand(t):
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            vals = np.asarray(f(x_of(t)), dtype=float) * np.exp(ljac(t))
        return np.where(np.isfinite(vals), vals, 0.0)[None, :]

    val, _, _ = _adaptive(integrand, t_lo, t_hi, spec.rel_tol, spec.abs_tol, spec.max_evals)
    return float(val[0])


def hellinger_sq_distance(model: LogDensityModel, alpha1, alpha2,
                          spec: IntegrationSpec | None = None) -> float:
    """Squared L2 distance between the probability amplitudes sqrt(p):

        int (sqrt(p(x|alpha2)) - sqrt(p(x|alpha1)))^2 dx  in [0, 2].
    """
    spec = spec or IntegrationSpec()
    a1 = model.require_in_support(alpha1)
    a2 = model.require_in_support(alpha2)

    def f(x):
        l1 = np.asarray(model.log_density(x, a1), dtype=float)
        l2 = np.asarray(model.log_density(x, a2), dtype=float)
        return (np.exp(0.5 * l2) - np.exp(0.5 * l1)) ** 2

    return _data_integral(model, f, spec)


def kl_divergence(model: LogDensityModel, alpha2, alpha1,
                  spec: IntegrationSpec | None = None) -> float:
    """Kullback-Leibler divergence of p(.|alpha1) from p(.|alpha2):

        int log[p(x|alpha2)/p(x|alpha1)] p(x|alpha2) dx.

    Requires the support of p(.|alpha2) to lie inside that of p(.|alpha1).
    """
    spec = spec or IntegrationSpec()
    a1 = model.require_in_support(alpha1)
    a2 = model.require_in_support(alpha2)

    def f(x):
        l1 = np.asarray(model.log_density(x, a1), dtype=float)
        l2 = np.asarray(model.log_density(x, a2), dtype=float)
        p2 = np.exp(l2)
        with np.errstate(invalid="ignore"):
            vals = np.where(p2 > 0.0, (l2 - l1) * p2, 0.0)
        if np.any(np.isposinf(vals)):
            raise DomainError("support of the first argument escapes that of the second")
        return vals

    return _data_integral(model, f, spec)


def fisher_information_batch(model: LogDensityModel, alphas, spec: IntegrationSpec | None = None,
                             *, form: str = "score", step_scale: float = 1e-4) -> np.ndarray:
    """Fisher matrices at a stack of parameter points, shape (N, p, p).

    One shared adaptive pass integrates every stencil component at every
    point, so a full grid sweep costs little more than a handful of single
    evaluations.  The score form is the default here: its first-difference
    stencil has a far lower roundoff floor, which matters when thousands of
    points feed a prior-normalization quadrature.
    """
    spec = spec or IntegrationSpec()
    alphas = np.atleast_2d(np.asarray(alphas, dtype=float))
    n, p = alphas.shape
    if p != model.param_dim:
        raise DomainError(f"parameter stack has width {p}, expected {model.param_dim}")
    for a in alphas:
        model.require_in_support(a)
    h = step_scale * np.maximum(1.0, np.abs(alphas))
    comps = [(j, k) for j in range(p) for k in range(j, p)]

    def observable_rows(x: np.ndarray) -> np.ndarray:
        """Stacked integrand rows, ((C*N), nx), already weighted by the density."""
        w = np.exp(log_density_many(model, x, alphas))
        if form == "score":
            scores = []
            for j in range(p):
                d = np.zeros_like(alphas)
                d[:, j] = h[:, j]
                diff = (log_density_many(model, x, alphas + d)
                        - log_density_many(model, x, alphas - d))
                scores.append(diff / (2.0 * h[:, j][:, None]))
            rows = [scores[j] * scores[k] for j, k in comps]
        elif form == "hessian":
            l0 = log_density_many(model, x, alphas)
            rows = []
            for j, k in comps:
                if j == k:
                    d = np.zeros_like(alphas)
                    d[:, j] = h[:, j]
                    sec = (log_density_many(model, x, alphas + d) - 2.0 * l0
                           + log_density_many(model, x, alphas - d)) / (h[:, j] ** 2)[:, None]
                else:
                    dj = np.zeros_like(alphas)
                    dj[:, j] = h[:, j]
                    dk = np.zeros_like(alphas)
                    dk[:, k] = h[:, k]
                    sec = (log_density_many(model, x, alphas + dj + dk)
                           - log_density_many(model, x, alphas + dj - dk)
                           - log_density_many(model, x, alphas - dj + dk)
                           + log_density_many(model, x, alphas - dj - dk)) \
                        / (4.0 * h[:, j] * h[:, k])[:, None]
                rows.append(-sec)
        else:
            raise DomainError(f"unknown Fisher form {form!r}")
        return np.concatenate([r * w for r in rows], axis=0)

    scheme = model.expectation_scheme
    if isinstance(scheme, DiscreteData):
        xs = np.asarray(scheme.points)
        vals = observable_rows(xs).sum(axis=1)
    else:
        if not isinstance(scheme, DataDomain):
            raise DomainError("batched Fisher needs a quadrature domain or discrete data")
        t_lo, t_hi, x_of, ljac = map_to_finite(scheme.lower, scheme.upper)

        def integrand(t):
            x = x_of(t)
            with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
                rows = observable_rows(x) * np.exp(ljac(t))[None, :]
            return np.where(np.isfinite(rows), rows, 0.0)

        eps = np.finfo(float).eps
        h_min = float(h.min())
        noise = 20.0 * eps / (h_min * h_min if form == "hessian" else h_min)
        rel = max(spec.rel_tol, noise)
        vals, _, _ = _adaptive(integrand, t_lo, t_hi, rel,
                               max(spec.abs_tol, noise * 1e-4), spec.max_evals,
                               batch_floor_frac=rel / 100.0)
    out = np.empty((n, p, p))
    for idx, (j, k) in enumerate(comps):
        block = vals[idx * n:(idx + 1) * n]
        out[:, j, k] = out[:, k, j] = block
    return out


def jeffreys_log_density_batch(model: LogDensityModel, alphas,
                               spec: IntegrationSpec | None = None,
                               *, form: str = "score", step_scale: float = 1e-4) -> np.ndarray:
    """0.5 log det J at a stack of parameter points, shape (N,)."""
    mats = fisher_information_batch(model, alphas, spec, form=form, step_scale=step_scale)
    dets = np.linalg.det(mats)
    p = model.param_dim
    scale = np.maximum(np.trace(mats, axis1=1, axis2=2) / p, 0.0) ** p
    bad = dets <= 1e-12 * scale
    if np.any(bad):
        i = int(np.argmax(bad))
        raise DegenerateMetricError(
            f"Fisher determinant degenerate at point index {i} "
            f"({np.atleast_2d(alphas)[i]!r}): det={dets[i]!r}")
    return 0.5 * np.log(dets)


def _map_support(support, forward):
    """Image of a coordinate box under ``forward``, bounded by its corners.

    Exact for maps that are monotone in each coordinate; callers with more
    exotic maps should pass an explicit support to ``reparameterize``.
    """
    big = 1e15
    axes = [(lo if math.isfinite(lo) else -big, hi if math.isfinite(hi) else big)
            for lo, hi in support]
    corners = [[]]
    for lo, hi in axes:
        corners = [c + [v] for c in corners for v in (lo, hi)]
    with np.errstate(all="ignore"):
        images = np.array([np.atleast_1d(np.asarray(forward(np.array(c, dtype=float)), dtype=float))
                           for c in corners])
    new = []
    for j in range(images.shape[1]):
        lo, hi = float(images[:, j].min()), float(images[:, j].max())
        new.append((-math.inf if lo <= -big / 10 else lo,
                    math.inf if hi >= big / 10 else hi))
    return tuple(new)


def reparameterize(model: LogDensityModel, rep: Reparameterization,
                   support: Sequence | None = None) -> LogDensityModel:
    """The same sampling model in the coordinates beta = forward(alpha).

    The original batched density path is only preserved when the map
    declares ``inverse_batch``; otherwise it is dropped, because feeding
    beta rows to a batch evaluator written for alpha would be silently
    wrong, and evaluation falls back to the per-point contract.
    """

    def log_density(x, beta):
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        alpha = np.atleast_1d(np.asarray(rep.inverse(beta), dtype=float))
        if not np.all(np.isfinite(alpha)):
            raise DomainError(f"inverse map failed at {beta!r}")
        return model.log_density(x, alpha)

    batch = None
    if model.log_density_batch is not None and rep.inverse_batch is not None:
        def batch(x, betas):  # noqa: F811 - deliberate conditional definition
            alphas = np.asarray(rep.inverse_batch(np.asarray(betas, dtype=float)), dtype=float)
            return model.log_density_batch(x, alphas)

    new_support = tuple(support) if support is not None else _map_support(model.support, rep.forward)
    return replace(model, log_density=log_density, log_density_batch=batch,
                   support=new_support,
                   name=(model.name + "|reparameterized") if model.name else "reparameterized")
