"""Independent verification engines.

Deterministic Monte-Carlo integration on a counter-based generator,
globally adaptive Gauss-Kronrod quadrature with transforms for unbounded
axes, and finite-difference derivatives.  The test suite uses these to
validate every closed form in the package, so nothing here may share code
with the implementations it checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .derivatives import finite_diff_gradient, finite_diff_hessian, steps_for
from .montecarlo import (
    box_volume,
    dirichlet_sampler,
    make_rng,
    mc_expectation,
    standard_normal_sampler,
    uniform_box_sampler,
)
from .quadrature import integrate_1d, integrate_2d, map_to_finite

__all__ = [
    "IntegrationSpec",
    "OracleEstimate",
    "integrate_nd",
    "integrate_1d",
    "integrate_2d",
    "map_to_finite",
    "mc_expectation",
    "make_rng",
    "uniform_box_sampler",
    "dirichlet_sampler",
    "standard_normal_sampler",
    "box_volume",
    "finite_diff_hessian",
    "finite_diff_gradient",
    "steps_for",
]

_SCHEMES = ("adaptive-quadrature", "monte-carlo", "exact-sum")


@dataclass(frozen=True)
class IntegrationSpec:
    """Configuration for an expectation or integral.

    ``seed`` only matters for the monte-carlo scheme; it keys a Philox
    stream, so equal specs give bit-identical results.
    """

    scheme: str = "adaptive-quadrature"
    abs_tol: float = 1e-13
    rel_tol: float = 1e-9
    max_evals: int = 2_000_000
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}; expected one of {_SCHEMES}")
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("tolerances must be positive")
        if self.max_evals <= 0:
            raise DomainError("max_evals must be positive")


@dataclass(frozen=True)
class OracleEstimate:
    """A numerical estimate with its accuracy claim.

    ``error`` is a standard error for Monte-Carlo estimates and an error
    bound for quadrature.  ``log_value`` carries the result on log scale
    for integrals whose magnitude would under- or overflow a double.
    """

    value: float
    error: float
    evals_used: int
    log_value: float | None = None

    @property
    def rel_error(self) -> float:
        if self.value == 0.0:
            return math.inf if self.error > 0.0 else 0.0
        return abs(self.error / self.value)


def _estimate_from_shifted(val: float, err: float, evals: int, shift: float) -> OracleEstimate:
    scale = math.exp(shift) if shift < 700.0 else math.inf
    log_value = (math.log(val) + shift) if val > 0.0 else -math.inf
    return OracleEstimate(value=val * scale, error=err * scale, evals_used=evals,
                          log_value=log_value)


def integrate_nd(f, bounds, spec: IntegrationSpec | None = None, *, log_integrand: bool = False) -> OracleEstimate:
    """Integrate over a box given as a sequence of (lo, hi) pairs.

    One- and two-dimensional boxes use adaptive quadrature (iterated for
    2-D); higher dimensions fall back to uniform Monte-Carlo on a finite
    box.  ``f`` must be vectorized: it receives one array per coordinate
    and must broadcast.  With ``log_integrand`` the function is exp(f).
    """
    spec = spec or IntegrationSpec()
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    dim = len(bounds)
    if spec.scheme == "monte-carlo" or dim > 2:
        sampler = uniform_box_sampler(bounds)
        vol = box_volume(bounds)

        def g(draws):
            cols = [draws[:, j] for j in range(dim)]
            vals = np.asarray(f(*cols), dtype=float)
            return np.exp(vals) if log_integrand else vals

        n = max(2, min(spec.max_evals, 1_000_000))
        mean, sem, used = mc_expectation(sampler, g, n, spec.seed)
        return OracleEstimate(value=mean * vol, error=sem * vol, evals_used=used,
                              log_value=math.log(abs(mean * vol)) if mean * vol > 0 else None)
    if dim == 1:
        val, err, evals, shift = integrate_1d(
            f, bounds[0][0], bounds[0][1],
            rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
            max_evals=spec.max_evals, log_integrand=log_integrand)
        return _estimate_from_shifted(val, err, evals, shift)
    if not log_integrand:
        def log_f(x, y):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.log(np.asarray(f(x, y), dtype=float))

        fn = log_f
    else:
        fn = f
    val, err, evals, shift = integrate_2d(
        fn, bounds[0], bounds[1],
        rel_tol=spec.rel_tol, max_evals=spec.max_evals)
    return _estimate_from_shifted(val, err, evals, shift)
