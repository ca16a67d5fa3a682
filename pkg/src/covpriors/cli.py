"""Batch command-line front end.

Each subcommand runs one analysis and emits a delimited table: '#'-prefixed
metadata lines (version, parameters, seed, tolerances; a timestamp unless
--deterministic), then an RFC-4180 header row and data rows with
17-significant-digit floats, or the JSON mirror of the same columns.
Identical configuration and seed give byte-identical files apart from the
timestamp.  ``--plot`` additionally renders the table to an image next to
the data.

Exit codes: 0 success, 1 numerical or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .casestudies import gauss_stdmean, marginalization, multinomial, multinormal
from .casestudies import neyman_scott as ns
from .casestudies import stein
from .errors import CovPriorsError
from .geometry import fisher_information, jeffreys_log_density
from .models import BUILTIN_MODELS
from .oracle import IntegrationSpec
from .oracle.fixtures import FixtureParseError, verify_fixtures

OUTPUT_DIR_ENV = "COVPRIORS_OUTPUT_DIR"


def format_float(x: float) -> str:
    """Lossless (round-trippable) decimal rendering of a double."""
    return f"{x:.17g}"


def parse_grid(spec: str) -> np.ndarray:
    """Grid syntax min:max:count, linearly spaced; log: prefix switches to
    logarithmic spacing."""
    log = spec.startswith("log:")
    body = spec[4:] if log else spec
    parts = body.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid {spec!r} is not min:max:count")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid {spec!r}: {exc}") from exc
    if count < 2 or not lo < hi:
        raise argparse.ArgumentTypeError(f"grid {spec!r} needs min < max and count >= 2")
    if log:
        if lo <= 0:
            raise argparse.ArgumentTypeError("log grids need positive endpoints")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}: {exc}") from exc


def parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad list {text!r}: {exc}") from exc


class Emitter:
    """Collects columns plus metadata and writes csv/json output."""

    def __init__(self, subcommand: str, args):
        self.subcommand = subcommand
        self.metadata = {"generator": f"covpriors {__version__}", "subcommand": subcommand}
        if getattr(args, "seed", None) is not None:
            self.metadata["seed"] = str(args.seed)
        if not args.deterministic:
            self.metadata["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        self.columns: dict = {}

    def meta(self, key: str, value) -> None:
        self.metadata[key] = format_float(value) if isinstance(value, float) else str(value)

    def add_columns(self, columns: dict) -> None:
        n = None
        for name, vals in columns.items():
            vals = np.atleast_1d(np.asarray(vals))
            if n is None:
                n = vals.size
            elif vals.size != n:
                raise CovPriorsError(f"column {name!r} has {vals.size} rows, expected {n}")
            self.columns[name] = vals

    def add_scalars(self, scalars: dict) -> None:
        self.add_columns({"name": np.array(list(scalars)),
                          "value": np.array([float(v) for v in scalars.values()])})

    def render_csv(self) -> str:
        buf = io.StringIO()
        for key, val in self.metadata.items():
            buf.write(f"# {key}={val}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(self.columns))
        cols = list(self.columns.values())
        for row in zip(*cols):
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else str(v)
                             for v in row])
        return buf.getvalue()

    def render_json(self) -> str:
        def cast(vals):
            out = []
            for v in vals.tolist():
                out.append(v if not isinstance(v, float) or math.isfinite(v) else repr(v))
            return out

        doc = {"metadata": self.metadata,
               "columns": {k: cast(v) for k, v in self.columns.items()}}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def write(self, args) -> None:
        text = self.render_json() if args.format == "json" else self.render_csv()
        path = args.output
        if path in (None, "-"):
            sys.stdout.write(text)
        else:
            out_dir = os.environ.get(OUTPUT_DIR_ENV)
            if out_dir and not os.path.isabs(path):
                path = os.path.join(out_dir, path)
            with open(path, "w", encoding="ascii", newline="") as fh:
                fh.write(text)
        if getattr(args, "plot", None):
            from .plotting import render_table

            render_table(self.subcommand, self.columns, self.metadata, args.plot)


def _add_common(sub):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--output", default="-", help="output path, or - for stdout "
                     f"(relative paths resolve inside ${OUTPUT_DIR_ENV} when set)")
    sub.add_argument("--seed", type=int, default=None, help="seed recorded in metadata "
                     "and used by any Monte-Carlo step")
    sub.add_argument("--deterministic", action="store_true",
                     help="suppress the timestamp so identical runs are byte-identical")
    sub.add_argument("--plot", default=None, metavar="PATH",
                     help="also render the table to an image file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covpriors",
        description="Covariant-prior analyses, model averaging, and the "
                    "classic paradox case studies.")
    parser.add_argument("--version", action="version", version=f"covpriors {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("fisher", help="Fisher information of a built-in model")
    p.add_argument("--model", choices=sorted(BUILTIN_MODELS), required=True)
    p.add_argument("--at", type=parse_float_list, required=True,
                   help="comma-separated parameter point")
    p.add_argument("--form", choices=("hessian", "score"), default="hessian")
    _add_common(p)

    p = subs.add_parser("gauss-stdmean",
                        help="evidences of the two reference-prior analyses of a "
                             "standardized Gaussian sample, for a range of n")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=25)
    _add_common(p)

    p = subs.add_parser("multinormal",
                        help="several Gaussian measurands with a common scale: "
                             "evidence, posterior moments, credible-ball curve")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pooled-s2", type=float, default=1.0)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--v-mu", type=float, default=1.0)
    p.add_argument("--xbar", type=parse_float_list, default=None)
    _add_common(p)

    p = subs.add_parser("multinomial",
                        help="cell-count model weights and averaged frequencies")
    p.add_argument("--counts", type=parse_int_list, required=True)
    p.add_argument("--m-max", type=int, default=100)
    _add_common(p)

    p = subs.add_parser("stein",
                        help="model-averaged signal amplitudes and mean power")
    p.add_argument("--x", type=parse_float_list, default=None,
                   help="observed amplitudes (alternative to --m/--xbar/--xi)")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--xbar", type=float, default=0.0)
    p.add_argument("--xi", type=float, default=1.0,
                   help="the amplitude whose averaged moments are swept")
    p.add_argument("--mean-square", type=float, default=None)
    p.add_argument("--s-grid", type=parse_grid, default=None,
                   help="sweep of sample standard deviations, min:max:count")
    _add_common(p)

    p = subs.add_parser("neyman-scott",
                        help="variance-floor models for paired Gaussian data")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s2", type=float, default=1.0)
    p.add_argument("--zeta0-grid", type=parse_grid, required=True,
                   help="grid of variance floors, min:max:count or log:min:max:count")
    _add_common(p)

    p = subs.add_parser("marginalization",
                        help="pooled-variance-only posterior vs the joint analysis")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s2", type=float, default=1.0)
    p.add_argument("--zeta-grid", type=parse_grid, default=None)
    _add_common(p)

    p = subs.add_parser("verify", help="re-run the oracle fixture file")
    p.add_argument("--fixtures", default=None,
                   help="fixture path (defaults to the packaged file)")
    _add_common(p)
    return parser


def _run_fisher(args, emitter: Emitter) -> None:
    model = BUILTIN_MODELS[args.model]()
    at = np.asarray(args.at, dtype=float)
    spec = IntegrationSpec(seed=args.seed or 0)
    fim = fisher_information(model, at, spec, form=args.form)
    rows_j, rows_k, vals = [], [], []
    for j in range(model.param_dim):
        for k in range(model.param_dim):
            rows_j.append(j + 1)
            rows_k.append(k + 1)
            vals.append(fim.matrix[j, k])
    emitter.meta("model", args.model)
    emitter.meta("at", ",".join(format_float(v) for v in at))
    emitter.meta("form", args.form)
    emitter.meta("rel_tol", spec.rel_tol)
    emitter.meta("volume_element_log_density", jeffreys_log_density(model, at, spec, form=args.form))
    emitter.add_columns({"row": np.array(rows_j), "col": np.array(rows_k),
                         "fisher_information": np.array(vals)})


def _run_gauss_stdmean(args, emitter: Emitter) -> None:
    table = gauss_stdmean.evidence_table(args.n_min, args.n_max)
    emitter.meta("up_to_constant", "true")
    emitter.add_columns(table)


def _run_multinormal(args, emitter: Emitter) -> None:
    inp = multinormal.MultinormalInput(
        m=args.m, n=args.n, pooled_s2=args.pooled_s2, q=args.q,
        sigma0=args.sigma0, v_mu=args.v_mu, xbar=args.xbar or ())
    rep = multinormal.multinormal_summary(inp)
    for key, val in rep.scalars.items():
        emitter.meta(key, val)
    for key, val in rep.flags.items():
        emitter.meta(f"flag_{key}", val)
    if "credible_ball" in rep.tables:
        emitter.add_columns(rep.tables["credible_ball"])
    else:
        emitter.add_scalars(rep.scalars)


def _run_multinomial(args, emitter: Emitter) -> None:
    inp = multinomial.MultinomialInput(counts=args.counts, m_max=args.m_max)
    rep = multinomial.multinomial_report(inp)
    for key, val in rep.scalars.items():
        emitter.meta(key, val)
    emitter.meta("counts", ",".join(str(c) for c in inp.counts))
    emitter.add_columns(rep.tables["models"])


def _run_stein(args, emitter: Emitter) -> None:
    if args.x is not None:
        inp = stein.SteinInput(x=args.x)
        rep = stein.stein_report(inp, s_grid=args.s_grid)
        for key, val in rep.scalars.items():
            emitter.meta(key, val)
        if "sweep" in rep.tables:
            emitter.add_columns(rep.tables["sweep"])
        else:
            emitter.add_scalars(rep.scalars)
        return
    if args.m is None or args.s_grid is None:
        raise CovPriorsError("stein needs either --x or both --m and --s-grid")
    m, xbar, xi = args.m, args.xbar, args.xi
    mean_square = args.mean_square if args.mean_square is not None else xbar * xbar
    emitter.meta("m", m)
    emitter.meta("xbar", float(xbar))
    emitter.meta("xi", float(xi))
    emitter.meta("mean_square", float(mean_square))
    s = args.s_grid
    emitter.add_columns({
        "s_x": s,
        "averaged_mean": np.array([stein.averaged_mean(xi, xbar, v * v, m) for v in s]),
        "averaged_second_moment": np.array(
            [stein.averaged_second_moment(xi, xbar, v * v, m) for v in s]),
        "averaged_mean_power": np.array(
            [stein.averaged_mean_power(mean_square + v * v, v * v, m) for v in s]),
    })


def _run_neyman_scott(args, emitter: Emitter) -> None:
    inp = ns.NeymanScottInput(m=args.m, s2=args.s2)
    rep = ns.neyman_scott_report(inp, args.zeta0_grid)
    for key, val in rep.scalars.items():
        emitter.meta(key, val)
    emitter.add_columns(rep.tables["floor_curve"])


def _run_marginalization(args, emitter: Emitter) -> None:
    rep = marginalization.marginalization_report(args.m, args.s2)
    for key, val in rep.scalars.items():
        emitter.meta(key, val)
    if args.zeta_grid is not None:
        emitter.add_columns({
            "zeta": args.zeta_grid,
            "posterior_density": np.exp(
                marginalization.zeta_log_posterior(args.m, args.s2, args.zeta_grid)),
        })
    else:
        emitter.add_scalars(rep.scalars)


def _run_verify(args, emitter: Emitter) -> bool:
    if args.fixtures is None:
        from importlib import resources

        text = (resources.files("covpriors") / "data" / "oracle_fixtures.txt").read_text()
        emitter.meta("fixtures", "packaged:oracle_fixtures.txt")
    else:
        with open(args.fixtures, "r", encoding="ascii") as fh:
            text = fh.read()
        emitter.meta("fixtures", args.fixtures)
    results = verify_fixtures(text)
    emitter.add_columns({
        "name": np.array([r.name for r in results]),
        "status": np.array(["pass" if r.passed else "FAIL" for r in results]),
        "stored": np.array([r.stored for r in results]),
        "recomputed": np.array([r.recomputed for r in results]),
        "deviation": np.array([r.deviation for r in results]),
        "tolerance": np.array([r.tol for r in results]),
    })
    n_fail = sum(not r.passed for r in results)
    emitter.meta("entries", str(len(results)))
    emitter.meta("failures", str(n_fail))
    if not results:
        emitter.meta("warning", "fixture file holds no entries")
        print("warning: fixture file holds no entries", file=sys.stderr)
    return n_fail == 0


_RUNNERS = {
    "fisher": _run_fisher,
    "gauss-stdmean": _run_gauss_stdmean,
    "multinormal": _run_multinormal,
    "multinomial": _run_multinomial,
    "stein": _run_stein,
    "neyman-scott": _run_neyman_scott,
    "marginalization": _run_marginalization,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    emitter = Emitter(args.subcommand, args)
    try:
        if args.subcommand == "verify":
            ok = _run_verify(args, emitter)
            emitter.write(args)
            return 0 if ok else 1
        _RUNNERS[args.subcommand](args, emitter)
        emitter.write(args)
        return 0
    except FixtureParseError as exc:
        json.dump({"error": "fixture-parse", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except CovPriorsError as exc:
        json.dump({"error": "computation", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1
    except OSError as exc:
        json.dump({"error": "io", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
