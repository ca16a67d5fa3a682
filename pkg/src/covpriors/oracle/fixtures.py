"""Versioned plain-text oracle fixtures.

Each fixture line names a registered recomputation, its parameters, the
frozen value, and an absolute tolerance.  ``verify_fixtures`` re-runs every
entry and reports per-entry pass/fail with the observed deviation; with a
counter-based generator behind every Monte-Carlo entry, repeated runs are
bit-identical for fixed seeds.

Line format (space-separated key=value tokens, '#' starts a comment):

    name=<unique label> check=<registry key> value=<float> tol=<float> [k=v ...]

The checks deliberately avoid the implementation paths they guard: gamma
normalizations use math.lgamma from the standard library, the Bessel check
integrates the cosh representation, the hypergeometric check sums the
defining series in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import DomainError
from .montecarlo import dirichlet_sampler, make_rng, mc_expectation
from .quadrature import integrate_1d, integrate_2d

FORMAT_VERSION = 1


# -- registered recomputations ------------------------------------------------

def _check_unit_line(p):
    val, _, _, _ = integrate_1d(lambda x: x, 0.0, 1.0, rel_tol=1e-13)
    return val


def _check_gauss_norm(p):
    val, _, _, _ = integrate_1d(lambda x: np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi),
                                -math.inf, math.inf, rel_tol=1e-12)
    return val


def _check_gen_inc_gamma(p):
    a, z1, z2 = p["a"], p["z1"], p["z2"]
    val, _, _, _ = integrate_1d(lambda t: np.exp((a - 1.0) * np.log(t) - t),
                                z1, z2, rel_tol=1e-12)
    return val


def _check_bessel_k0(p):
    x = p["x"]

    def integrand(t):
        with np.errstate(over="ignore"):
            return np.exp(-x * np.cosh(t))

    val, _, _, _ = integrate_1d(integrand, 0.0, math.inf, rel_tol=1e-12)
    return val


def _check_student_ball(p):
    q, mn = int(p["q"]), int(p["mn"])
    c = 1.0 / math.sqrt(mn - 2.0)
    front = 2.0 * math.exp(math.lgamma(0.5 * (mn + q)) - math.lgamma(0.5 * mn)
                           - math.lgamma(0.5 * q))
    val, _, _, _ = integrate_1d(
        lambda t: t ** (q - 1) * (1.0 + t * t) ** (-0.5 * (mn + q)), 0.0, c,
        rel_tol=1e-12)
    return front * val


def _check_gauss_std_evidence(p):
    """2-D quadrature of the standardized-data Gaussian evidence, under the
    1/sigma prior (kind=mean) or the standardized-mean prior (kind=stdmean)."""
    n = int(p["n"])
    kind = p["kind"]

    def log_f(first, sigma):
        if kind == "mean":
            mu, extra = first, 0.0
        elif kind == "stdmean":
            mu, extra = first * sigma, -0.5 * np.log(2.0 + first * first)
        else:
            raise DomainError(f"unknown evidence kind {kind!r}")
        return (-0.5 * n * math.log(2 * math.pi) - (n + 1) * np.log(sigma)
                - n * (1.0 + mu * mu) / (2.0 * sigma * sigma) + extra)

    val, _, _, shift = integrate_2d(log_f, (-math.inf, math.inf), (0.0, math.inf),
                                    rel_tol=1e-9)
    return val * math.exp(shift)


def _check_mc_dirichlet_norm(p):
    """Simplex integral of prod theta_i^(-1/2) by importance sampling from
    a Dirichlet(3/4, ...) proposal; the exact value is the beta-function
    constant Gamma(1/2)^dim / Gamma(dim/2)."""
    dim, n, seed = int(p["dim"]), int(p["n"]), int(p["seed"])
    prop = 0.75
    log_b_prop = dim * math.lgamma(prop) - math.lgamma(dim * prop)

    def g(draws):
        return np.exp((0.5 - prop) * np.log(draws).sum(axis=1) + log_b_prop)

    mean, _, _ = mc_expectation(dirichlet_sampler([prop] * dim), g, n, seed)
    return mean


def _check_mc_multinomial_evidence(p):
    """Marginal likelihood of multinomial counts under the Dirichlet(1/2)
    prior, as a plain prior average of the multinomial probability."""
    counts = np.array([int(c) for c in str(p["counts"]).split("|")], dtype=float)
    n, seed = int(p["n"]), int(p["seed"])
    tot = counts.sum()
    log_coef = math.lgamma(tot + 1.0) - sum(math.lgamma(c + 1.0) for c in counts)

    def g(draws):
        return np.exp(log_coef + (np.log(draws) * counts).sum(axis=1))

    mean, _, _ = mc_expectation(dirichlet_sampler([0.5] * counts.size), g, n, seed)
    return mean


def _check_mc_score_variance(p):
    """Variance of the location score of a unit Gaussian: exactly one."""
    mu, n, seed = p["mu"], int(p["n"]), int(p["seed"])

    def sampler(rng, k):
        return mu + rng.standard_normal(k)

    mean, _, _ = mc_expectation(sampler, lambda x: (x - mu) ** 2, n, seed)
    return mean


def _check_mc_noncentral_chi2(p):
    """Density of (Z + x0)^2 at x, from a histogram window of width 2h."""
    x0, x, h = p["x0"], p["x"], p["h"]
    n, seed = int(p["n"]), int(p["seed"])
    rng = make_rng(seed)
    draws = (rng.standard_normal(n) + x0) ** 2
    return float(np.count_nonzero(np.abs(draws - x) <= h)) / (2.0 * h * n)


def _check_hessian_quadratic(p):
    from .derivatives import finite_diff_hessian

    hess = finite_diff_hessian(lambda v: float(v[0] ** 2), [p["at"]])
    return float(hess[0, 0])


def _check_series_hyp2f1(p):
    """Gauss series summed in exact rational arithmetic (terms as given,
    no transformation), then rounded once to a double."""
    a, b, c, z = (Fraction(str(p[k])) for k in ("a", "b", "c", "z"))
    terms = int(p["terms"])
    total = Fraction(1)
    term = Fraction(1)
    for k in range(terms):
        term *= (a + k) * (b + k) * z / ((c + k) * (k + 1))
        total += term
    return float(total)


CHECKS = {
    "quad_unit_line": _check_unit_line,
    "quad_gauss_norm": _check_gauss_norm,
    "quad_gen_inc_gamma": _check_gen_inc_gamma,
    "quad_bessel_k0": _check_bessel_k0,
    "quad_student_ball": _check_student_ball,
    "quad_gauss_std_evidence": _check_gauss_std_evidence,
    "mc_dirichlet_norm": _check_mc_dirichlet_norm,
    "mc_multinomial_evidence": _check_mc_multinomial_evidence,
    "mc_score_variance": _check_mc_score_variance,
    "mc_noncentral_chi2": _check_mc_noncentral_chi2,
    "fd_hessian_quadratic": _check_hessian_quadratic,
    "series_hyp2f1": _check_series_hyp2f1,
}


# -- fixture file parsing and verification ------------------------------------

@dataclass(frozen=True)
class FixtureEntry:
    name: str
    check: str
    value: float
    tol: float
    params: dict
    line_no: int


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    stored: float
    recomputed: float
    deviation: float
    tol: float


class FixtureParseError(DomainError):
    pass


def _parse_token(raw: str):
    try:
        if raw.lower() in ("inf", "+inf"):
            return math.inf
        f = float(raw)
        return f
    except ValueError:
        return raw


def parse_fixtures(text: str):
    entries = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = {}
        for token in line.split():
            if "=" not in token:
                raise FixtureParseError(f"line {line_no}: token {token!r} is not key=value")
            key, _, raw = token.partition("=")
            fields[key] = raw
        for req in ("name", "check", "value", "tol"):
            if req not in fields:
                raise FixtureParseError(f"line {line_no}: missing required key {req!r}")
        if fields["check"] not in CHECKS:
            raise FixtureParseError(
                f"line {line_no}: unknown check {fields['check']!r}")
        params = {k: _parse_token(v) for k, v in fields.items()
                  if k not in ("name", "check", "value", "tol")}
        entries.append(FixtureEntry(
            name=fields["name"], check=fields["check"],
            value=float(fields["value"]), tol=float(fields["tol"]),
            params=params, line_no=line_no))
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise FixtureParseError("duplicate fixture names")
    return entries


def verify_fixtures(text: str):
    """Re-run every fixture; returns a list of FixtureResult."""
    results = []
    for entry in parse_fixtures(text):
        recomputed = float(CHECKS[entry.check](entry.params))
        deviation = abs(recomputed - entry.value)
        results.append(FixtureResult(
            name=entry.name, passed=bool(deviation <= entry.tol),
            stored=entry.value, recomputed=recomputed,
            deviation=deviation, tol=entry.tol))
    return results


def format_fixture_line(name: str, check: str, value: float, tol: float, **params) -> str:
    parts = [f"name={name}", f"check={check}"]
    for k, v in params.items():
        if isinstance(v, float):
            parts.append(f"{k}={v!r}")
        else:
            parts.append(f"{k}={v}")
    parts.append(f"value={value!r}")
    parts.append(f"tol={tol:g}")
    return " ".join(parts)


DEFAULT_ENTRIES = [
    ("unit_line", "quad_unit_line", 1e-13, {}),
    ("gauss_norm", "quad_gauss_norm", 1e-10, {}),
    ("gen_inc_gamma_2.5_0.3_4.0", "quad_gen_inc_gamma", 1e-11,
     {"a": 2.5, "z1": 0.3, "z2": 4.0}),
    ("gen_inc_gamma_3_0_inf", "quad_gen_inc_gamma", 1e-10,
     {"a": 3.0, "z1": 0.0, "z2": math.inf}),
    ("bessel_k0_1", "quad_bessel_k0", 1e-11, {"x": 1.0}),
    ("bessel_k0_0.5", "quad_bessel_k0", 1e-11, {"x": 0.5}),
    ("student_ball_q1_mn12", "quad_student_ball", 1e-10, {"q": 1, "mn": 12}),
    ("student_ball_q12_mn12", "quad_student_ball", 1e-12, {"q": 12, "mn": 12}),
    ("gauss_std_evidence_mean_n5", "quad_gauss_std_evidence", 1e-10,
     {"n": 5, "kind": "mean"}),
    ("gauss_std_evidence_stdmean_n4", "quad_gauss_std_evidence", 1e-9,
     {"n": 4, "kind": "stdmean"}),
    ("dirichlet_norm_dim3", "mc_dirichlet_norm", None,
     {"dim": 3, "n": 400_000, "seed": 20240817}),
    ("multinomial_evidence_2_1_5", "mc_multinomial_evidence", None,
     {"counts": "2|1|5", "n": 1_000_000, "seed": 20240818}),
    ("score_variance_mu0", "mc_score_variance", None,
     {"mu": 0.0, "n": 1_000_000, "seed": 20240819}),
    ("noncentral_chi2_x0_2_at_2", "mc_noncentral_chi2", None,
     {"x0": 2.0, "x": 2.0, "h": 0.05, "n": 10_000_000, "seed": 20240820}),
    ("hessian_quadratic_at0", "fd_hessian_quadratic", 1e-8, {"at": 0.0}),
    ("hyp2f1_series_0.5_6.5_1.5", "series_hyp2f1", 1e-13,
     {"a": 0.5, "b": 6.5, "c": 1.5, "z": -0.1, "terms": 200}),
]

_MC_TOL_SIGMAS = 3.0


def _mc_sem(check: str, params: dict) -> float:
    """Standard error of a Monte-Carlo check, for freezing its tolerance."""
    n, seed = int(params["n"]), int(params["seed"])
    if check == "mc_dirichlet_norm":
        dim = int(params["dim"])
        prop = 0.75
        log_b = dim * math.lgamma(prop) - math.lgamma(dim * prop)
        _, sem, _ = mc_expectation(
            dirichlet_sampler([prop] * dim),
            lambda d: np.exp((0.5 - prop) * np.log(d).sum(axis=1) + log_b), n, seed)
        return sem
    if check == "mc_multinomial_evidence":
        counts = np.array([int(c) for c in str(params["counts"]).split("|")], dtype=float)
        log_coef = math.lgamma(counts.sum() + 1.0) - sum(math.lgamma(c + 1.0) for c in counts)
        _, sem, _ = mc_expectation(
            dirichlet_sampler([0.5] * counts.size),
            lambda d: np.exp(log_coef + (np.log(d) * counts).sum(axis=1)), n, seed)
        return sem
    if check == "mc_score_variance":
        mu = params["mu"]
        _, sem, _ = mc_expectation(lambda rng, k: mu + rng.standard_normal(k),
                                   lambda x: (x - mu) ** 2, n, seed)
        return sem
    if check == "mc_noncentral_chi2":
        # binomial standard error of the histogram window estimate
        p_hat = _check_mc_noncentral_chi2(params) * 2.0 * params["h"]
        return math.sqrt(p_hat * (1.0 - p_hat) / n) / (2.0 * params["h"])
    raise DomainError(f"no standard-error rule for {check!r}")


def regenerate(path: str) -> None:
    """Recompute every default fixture and rewrite the file at ``path``."""
    lines = [
        f"# covpriors oracle fixtures format={FORMAT_VERSION}",
        f"# numpy={np.__version__} (informational; values are seed-pinned)",
    ]
    for name, check, tol, params in DEFAULT_ENTRIES:
        value = float(CHECKS[check](params))
        if tol is None:
            tol = _MC_TOL_SIGMAS * _mc_sem(check, params)
        lines.append(format_fixture_line(name, check, value, float(tol), **params))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":  # pragma: no cover - maintenance hook
    import sys

    regenerate(sys.argv[1])
