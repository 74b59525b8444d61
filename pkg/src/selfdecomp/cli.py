"""Command-line front end.

::

    selfdecomp eval    --family mwright --beta 0.5 --points 0:5:0.5
    selfdecomp mellin  --family foxh --r 2 --alpha 0.5 --z 1
    selfdecomp sample  --family mwright --beta 0.3 --n 1000 --seed 7
    selfdecomp table   --family foxh --r 2 --alpha 0.5 --out table.csv
    selfdecomp verify  exp --beta 0.5 --seed 1

Exit status: 0 success or pass, 1 verification failure, 2 usage or domain
error, 3 numerical failure. Verification reports are JSON documents that
validate against ``data/report.schema.json``.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import distributions as dist
from .errors import ConvergenceError, DomainError, TableUnavailableError
from .families import DistributionSpec, Family, _PARAMS
from .mellin import QuadratureConfig, analytic_mellin, numeric_mellin, parse_complex
from .specfun import generalized_mittag_leffler, mittag_leffler
from . import verify as vf

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_PARAM_FLAGS = ("r", "k", "beta", "alpha")
_fmt = dist.format_float


class UsageError(Exception):
    """Raised for flag combinations that argparse alone cannot reject."""

    def __init__(self, parser, message):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(self, message)


# ---------------------------------------------------------------------------
# argument types


def _points(text):
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if not step > 0 or stop < start:
        raise argparse.ArgumentTypeError("need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _complex(text):
    try:
        return parse_complex(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


# ---------------------------------------------------------------------------
# parser


def _add_family(p, required=True):
    p.add_argument("--family", required=required,
                   help="exponential, gamma, weibull, stable, mwright, foxh, "
                        "gaussian_residual or halfnormal")
    p.add_argument("--beta", type=float, help="order of the M-Wright / stable law")
    p.add_argument("--alpha", type=float, help="decomposition exponent")
    p.add_argument("--r", type=float, help="gamma shape")
    p.add_argument("--k", type=float, help="Weibull shape")


def _add_output(p, default_format):
    p.add_argument("--out", type=Path, help="write to this file instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default=default_format)


def _add_tolerances(p):
    p.add_argument("--tol-abs", type=float, default=1e-10, help="quadrature absolute tolerance")
    p.add_argument("--tol-rel", type=float, default=1e-8, help="quadrature relative tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="selfdecomp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate a density, CDF or Laplace transform on a grid")
    _add_family(p)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--points", type=_points, help="linear grid start:stop:step (inclusive)")
    grid.add_argument("--log-points", nargs=3, metavar=("N", "A", "B"),
                      help="N log-spaced points between A and B")
    p.add_argument("--kind", choices=("pdf", "cdf", "laplace"), default="pdf",
                   help="laplace: Mittag-Leffler transform (mwright, foxh only)")
    _add_tolerances(p)
    _add_output(p, "csv")

    p = sub.add_parser("mellin", help="Mellin transform of a density")
    _add_family(p)
    p.add_argument("--z", type=_complex, action="append", required=True,
                   help="argument as re+imi; repeatable")
    p.add_argument("--method", choices=("closed-form", "quadrature"), default="closed-form")
    _add_tolerances(p)
    _add_output(p, "csv")

    p = sub.add_parser("sample", help="draw a reproducible sample")
    _add_family(p, required=False)
    p.add_argument("--product", choices=("exp", "gamma", "gaussian"),
                   help="draw Z**a * R for a decomposition instead of a single family")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--method", choices=("fold", "gamma"), help="half-normal construction")
    p.add_argument("--grid-size", type=_positive_int, default=4096,
                   help="inverse-CDF table size for tabulated families")
    _add_output(p, "csv")

    p = sub.add_parser("table", help="build an inverse-CDF table")
    _add_family(p)
    p.add_argument("--grid-size", type=_positive_int, default=4096)
    _add_tolerances(p)
    _add_output(p, "csv")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=("exp", "gamma", "gaussian", "laplace", "characterize",
                                     "limit"))
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--n", type=_positive_int, help="Monte Carlo sample size")
    p.add_argument("--seed", type=_seed, default=1)
    p.add_argument("--grid-size", type=_positive_int, default=4096)
    p.add_argument("--from-file", type=Path,
                   help="CSV of product draws (header 'value') to test instead of sampling")
    p.add_argument("--method", choices=("fold", "gamma"), default="fold",
                   help="half-normal construction (gaussian suite)")
    p.add_argument("--s-values", type=_float_list, default=[0.5, 1.0, 2.0],
                   help="Laplace arguments, comma-separated")
    p.add_argument("--kind", choices=("exp", "gamma", "gaussian"),
                   help="characterization kind")
    p.add_argument("--z", type=_complex, help="orbit start for characterize")
    p.add_argument("--steps", type=_positive_int, default=60)
    p.add_argument("--betas", type=_float_list, default=[0.4, 0.2, 0.1, 0.05],
                   help="decreasing orders for the limit check")
    _add_tolerances(p)
    _add_output(p, "json")
    return parser


# ---------------------------------------------------------------------------
# helpers


def _spec(args, parser) -> DistributionSpec:
    given = {k: getattr(args, k, None) for k in _PARAM_FLAGS}
    try:
        spec = DistributionSpec.from_name(args.family, **given)
    except DomainError as exc:
        raise UsageError(parser, str(exc)) from None
    extra = [f"--{k}" for k, v in given.items() if v is not None and k not in _PARAMS[spec.family]]
    if extra:
        raise UsageError(parser, f"{', '.join(extra)} not accepted for family {spec.family.value}")
    return spec


def _quad_cfg(args):
    return QuadratureConfig(abs_tol=args.tol_abs, rel_tol=args.tol_rel)


def _grid(args, parser):
    if args.points is not None:
        return args.points
    try:
        n, a, b = int(args.log_points[0]), float(args.log_points[1]), float(args.log_points[2])
    except ValueError:
        raise UsageError(parser, "--log-points expects N A B") from None
    if n < 1 or not (0 < a <= b):
        raise UsageError(parser, "--log-points needs N >= 1 and 0 < A <= B")
    return np.geomspace(a, b, n)


def _rows_to_text(header, rows, fmt):
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v)
                           for v in r) + "\n")
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_eval(args, parser):
    spec = _spec(args, parser)
    x = _grid(args, parser)
    if args.kind == "pdf":
        values = np.asarray(dist.pdf(spec, x), dtype=float)
    elif args.kind == "cdf":
        values = np.asarray(dist.cdf_numeric(spec, x, _quad_cfg(args)), dtype=float)
    else:
        if spec.family is Family.MWRIGHT:
            values = np.asarray(mittag_leffler(x, spec.params["beta"]), dtype=float)
        elif spec.family is Family.FOXH:
            r, a = spec.params["r"], spec.params["alpha"]
            values = np.asarray(generalized_mittag_leffler(x, a, r * (1 - a) + a), dtype=float)
        else:
            raise UsageError(parser, "--kind laplace is available for mwright and foxh")
    values = np.atleast_1d(values)
    rows = [(float(a), float(b)) for a, b in zip(np.atleast_1d(x), values)]
    _emit(_rows_to_text(("x", "value"), rows, args.format), args.out)
    return EXIT_OK


def _cmd_mellin(args, parser):
    spec = _spec(args, parser)
    rows = []
    for z in args.z:
        if args.method == "closed-form":
            mv = analytic_mellin(spec, z)
        else:
            mv = numeric_mellin(lambda x: dist.pdf(spec, x), z, spec.strip, _quad_cfg(args),
                                head_exponent=spec.head_exponent)
        rows.append((mv.z.real, mv.z.imag, mv.value.real, mv.value.imag, mv.method))
    header = ("z_re", "z_im", "value_re", "value_im", "method")
    _emit(_rows_to_text(header, rows, args.format), args.out)
    return EXIT_OK


def _cmd_sample(args, parser):
    if args.product:
        params = {k: getattr(args, k) for k in ("beta", "alpha", "r") if getattr(args, k) is not None}
        needed = {"exp": ("beta",), "gamma": ("r", "alpha"), "gaussian": ("alpha",)}[args.product]
        missing = [f"--{k}" for k in needed if k not in params]
        extra = [f"--{k}" for k in params if k not in needed]
        if missing or extra or args.family:
            raise UsageError(parser, f"--product {args.product} takes exactly "
                             + ", ".join(f"--{k}" for k in needed))
        batch = vf.product_sample(args.product, params, args.n, args.seed,
                                  halfnormal_method=args.method,
                                  table_grid_size=args.grid_size)
        label = {"product": args.product, **params}
    else:
        if not args.family:
            raise UsageError(parser, "one of --family or --product is required")
        spec = _spec(args, parser)
        if spec.family in (Family.FOXH, Family.GAUSSIAN_RESIDUAL):
            dist.ensure_table(spec, args.grid_size)
        batch = dist.sample(spec, args.n, args.seed, method=args.method)
        label = spec.to_dict()
    if args.format == "csv":
        text = batch.to_csv()
    else:
        text = json.dumps({"spec": label, "seed": args.seed, "n": args.n,
                           "values": [float(v) for v in batch.values]}, indent=2,
                          sort_keys=True) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_table(args, parser):
    spec = _spec(args, parser)
    table = dist.build_inverse_cdf_table(spec, args.grid_size, _quad_cfg(args))
    if args.format == "csv":
        text = table.to_csv()
    else:
        text = json.dumps({"spec": spec.to_dict(), "version": dist.TABLE_FORMAT_VERSION,
                           "head_exponent": table.head_exponent,
                           "tail_slope": table.tail_slope,
                           "probabilities": table.probabilities.tolist(),
                           "quantiles": table.quantiles.tolist()}, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


_SUITE_PARAMS = {
    "exp": ("beta",),
    "gamma": ("r", "alpha"),
    "gaussian": ("alpha",),
    "laplace": ("beta",),
    "limit": (),
}


def _cmd_verify(args, parser):
    suite = args.suite
    given = {k: getattr(args, k) for k in ("beta", "alpha", "r") if getattr(args, k) is not None}
    if suite == "characterize":
        kind = args.kind or "exp"
        needed = {"exp": ("beta",), "gamma": ("r", "alpha"), "gaussian": ("alpha",)}[kind]
    else:
        needed = _SUITE_PARAMS[suite]
        if args.kind:
            raise UsageError(parser, "--kind is only accepted by 'verify characterize'")
    missing = [f"--{k}" for k in needed if k not in given]
    extra = [f"--{k}" for k in given if k not in needed]
    if missing:
        raise UsageError(parser, f"verify {suite} requires {', '.join(missing)}")
    if extra:
        raise UsageError(parser, f"{', '.join(extra)} not accepted by verify {suite}")
    if args.from_file and suite not in ("exp", "gamma", "gaussian"):
        raise UsageError(parser, "--from-file applies to the exp, gamma and gaussian suites")

    product = None
    n = args.n or 200_000
    if args.from_file:
        try:
            product = dist.SampleBatch.from_csv(args.from_file, seed=args.seed)
        except (OSError, ValueError) as exc:
            raise UsageError(parser, f"--from-file: {exc}") from None
        n = args.n or product.n
    cfg = vf.VerifyConfig(quad=_quad_cfg(args), n_samples=n, seed=args.seed,
                          table_grid_size=args.grid_size)

    if suite == "exp":
        rep = vf.verify_exponential_decomposition(given["beta"], cfg, product=product)
    elif suite == "gamma":
        rep = vf.verify_gamma_decomposition(given["r"], given["alpha"], cfg, product=product)
    elif suite == "gaussian":
        rep = vf.verify_gaussian_decomposition(given["alpha"], cfg, args.method, product=product)
    elif suite == "laplace":
        rep = vf.laplace_pair_check(given["beta"], args.s_values, cfg)
    elif suite == "characterize":
        z0 = args.z if args.z is not None else complex(4.0)
        rep = vf.characterization_report(kind, given, z0, args.steps, cfg)
    else:
        rep = vf.limit_beta_zero_check(args.betas, args.n or 100_000, args.seed)

    if args.format == "json":
        text = rep.to_json() + "\n"
    else:
        subs = list(rep.details.get("subchecks") or []) + [rep]
        rows = [(s.test_id, float(s.metric), float(s.threshold), str(s.passed).lower())
                for s in subs]
        text = _rows_to_text(("test_id", "metric", "threshold", "pass"), rows, "csv")
    _emit(text, args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


_COMMANDS = {
    "eval": _cmd_eval,
    "mellin": _cmd_mellin,
    "sample": _cmd_sample,
    "table": _cmd_table,
    "verify": _cmd_verify,
}


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices.get(name, parser)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line; returns the exit status."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        sub = _subparser(parser, args.command)
        return _COMMANDS[args.command](args, sub)
    except UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        sys.stderr.write(f"{exc.parser.prog}: error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"selfdecomp: error: {exc}\n")
        return EXIT_USAGE
    except (ConvergenceError, TableUnavailableError, FloatingPointError) as exc:
        sys.stderr.write(f"selfdecomp: numerical failure: {exc}\n")
        return EXIT_NUMERIC


run = main

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
