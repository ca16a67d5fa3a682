"""Seeded Monte-Carlo estimation on a counter-based generator.

All randomness flows through numpy's Philox bit generator keyed by an
explicit 64-bit seed, so estimates are bit-reproducible for a fixed seed
regardless of how many estimates were drawn before them.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import DomainError


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator for a 64-bit seed."""
    if seed < 0 or seed >= 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.Philox(key=seed))


def mc_expectation(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    n: int,
    seed: int,
):
    """Sample mean of g over ``n`` draws from ``sampler``.

    ``sampler(rng, n)`` must return an array whose leading axis indexes the
    draws; ``g`` must map it to one value per draw.  Returns
    (mean, standard_error, n).
    """
    if n < 2:
        raise DomainError(f"mc_expectation needs n >= 2 draws, got {n!r}")
    rng = make_rng(seed)
    draws = sampler(rng, n)
    vals = np.asarray(g(draws), dtype=float)
    if vals.shape[0] != n:
        raise DomainError("g must return one value per draw")
    mean = float(vals.mean())
    sem = float(vals.std(ddof=1) / np.sqrt(n))
    return mean, sem, n


def uniform_box_sampler(bounds) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler factory for the uniform distribution on a finite box."""
    lows = np.array([b[0] for b in bounds], dtype=float)
    highs = np.array([b[1] for b in bounds], dtype=float)
    if not np.all(np.isfinite(lows)) or not np.all(np.isfinite(highs)):
        raise DomainError("uniform box sampling needs finite bounds")

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.random((n, lows.size))
        return lows + (highs - lows) * u

    return sampler


def box_volume(bounds) -> float:
    vol = 1.0
    for lo, hi in bounds:
        vol *= hi - lo
    return vol


def dirichlet_sampler(alpha) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler factory for a Dirichlet distribution on the probability simplex."""
    alpha = np.asarray(alpha, dtype=float)

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.dirichlet(alpha, size=n)

    return sampler


def standard_normal_sampler(dim: int = 1) -> Callable[[np.random.Generator, int], np.ndarray]:
    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        out = rng.standard_normal((n, dim))
        return out[:, 0] if dim == 1 else out

    return sampler
