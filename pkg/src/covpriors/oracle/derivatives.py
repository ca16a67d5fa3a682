"""Finite-difference derivatives of scalar functions of several variables."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..errors import DomainError


def steps_for(point: np.ndarray, step_scale: float = 1e-4) -> np.ndarray:
    """Per-coordinate central-difference step: step_scale * max(1, |x_j|)."""
    point = np.asarray(point, dtype=float)
    return step_scale * np.maximum(1.0, np.abs(point))


def finite_diff_gradient(f: Callable, point: Sequence[float], step_scale: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of a scalar function."""
    x = np.asarray(point, dtype=float)
    h = steps_for(x, step_scale)
    grad = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h[j]
        grad[j] = (f(x + e) - f(x - e)) / (2.0 * h[j])
    if not np.all(np.isfinite(grad)):
        raise DomainError(f"non-finite gradient at {x!r}")
    return grad


def finite_diff_hessian(f: Callable, point: Sequence[float], step_scale: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian, symmetrized by averaging.

    Diagonal entries use the three-point second difference, off-diagonals
    the four-point cross stencil.  Raises DomainError on non-finite values.
    """
    x = np.asarray(point, dtype=float)
    p = x.size
    h = steps_for(x, step_scale)
    hess = np.empty((p, p), dtype=float)
    f0 = f(x)
    for j in range(p):
        ej = np.zeros(p)
        ej[j] = h[j]
        hess[j, j] = (f(x + ej) - 2.0 * f0 + f(x - ej)) / (h[j] * h[j])
        for k in range(j + 1, p):
            ek = np.zeros(p)
            ek[k] = h[k]
            cross = (f(x + ej + ek) - f(x + ej - ek) - f(x - ej + ek) + f(x - ej - ek))
            hess[j, k] = hess[k, j] = cross / (4.0 * h[j] * h[k])
    hess = 0.5 * (hess + hess.T)
    if not np.all(np.isfinite(hess)):
        raise DomainError(f"non-finite Hessian at {x!r}")
    return hess
