"""Command-line front end writing self-describing CSV.

Every output starts with ``# tailquant v<version> spec=<canonical spec>``
where the spec string lists every resolved option as sorted ``key=value``
pairs, so a file can be regenerated from its own header.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys

import numpy as np

from . import __version__
from .analysis import (
    build_error_curve,
    compare,
    default_grid,
    expansion_ladder,
    fit_order,
)
from .distributions import Gamma, Normal, SkewNormal, SkewSlash, VarianceGamma
from .errors import InsufficientData, OracleError, TailquantError, TooManyFailures
from .gg_tail import ApproxMethod, Tail
from .oracle import OracleConfig
from .tail_dependence import CopulaParams, copula_report

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ORACLE = 3

# required parameters per family, with defaults for the optional ones
_FAMILIES = {
    "normal": (Normal, (), {}),
    "skewnormal": (SkewNormal, ("lam",), {}),
    "gamma": (Gamma, ("alpha",), {"beta": 1.0}),
    "vg": (VarianceGamma, ("theta", "nu"), {}),
    "skewslash": (SkewSlash, ("theta", "lam"), {}),
}
_PARAM_FLAGS = ("lam", "alpha", "beta", "theta", "nu")


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    """17 significant digits, locale independent; non-finite values spelled ``nan``/``inf``."""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _build_dist(args):
    cls, required, defaults = _FAMILIES[args.dist]
    kwargs = {}
    for name in _PARAM_FLAGS:
        value = getattr(args, name)
        if name in required:
            if value is None:
                raise UsageError(f"--dist {args.dist} requires --{name}")
            kwargs[name] = value
        elif name in defaults:
            kwargs[name] = defaults[name] if value is None else value
        elif value is not None:
            raise UsageError(f"--{name} does not apply to --dist {args.dist}")
    return cls(**kwargs)


def _parse_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("--grid must look like start:end:points")
    try:
        start, end, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"cannot parse --grid {text!r}") from None
    if points < 2:
        raise UsageError("--grid needs at least 2 points")
    if not (0 < start < 1 and 0 < end < 1) or start == end:
        raise UsageError("--grid endpoints must be distinct and lie in (0, 1)")
    return start, end, points


def _parse_u_list(text: str) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --u-list {text!r}") from None
    if not values or any(not 0 < u < 1 for u in values):
        raise UsageError("--u-list values must lie in (0, 1)")
    return values


def _tail_masses(args, side: Tail) -> np.ndarray:
    """Grid of tail masses ``v``; an upper-tail grid is given in ``u`` and spaced in ``1 - u``."""
    if args.u_list is not None:
        us = np.array(_parse_u_list(args.u_list))
    elif args.grid is not None:
        start, end, points = _parse_grid(args.grid)
        if side is Tail.UPPER:
            return np.geomspace(1.0 - start, 1.0 - end, points)
        us = np.geomspace(start, end, points)
    else:
        return default_grid(extended=args.extended)
    if side is Tail.UPPER:
        if np.any(us <= 0.5):
            raise UsageError("upper-tail grids need u > 1/2")
        return 1.0 - us
    if np.any(us > 0.5):
        raise UsageError("lower-tail grids need u <= 1/2")
    return us


def _side(args, dist) -> Tail:
    if args.side is not None:
        side = Tail(args.side)
    elif len(dist.sides) == 1:
        side = dist.sides[0]
    else:
        side = Tail.LOWER
    if side not in dist.sides:
        raise UsageError(f"{dist.label()} has no {side} tail model")
    return side


def _oracle(args) -> OracleConfig:
    base = OracleConfig()
    kw = {}
    for name in ("abs_tol", "rel_tol", "root_tol", "max_iter", "max_panels"):
        value = getattr(args, name)
        kw[name] = getattr(base, name) if value is None else value
    return OracleConfig(**kw)


def _workers(args) -> int:
    env = os.environ.get("TAILQUANT_THREADS")
    cap = None
    if env is not None:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError("TAILQUANT_THREADS must be an integer >= 1") from None
        if cap < 1:
            raise UsageError("TAILQUANT_THREADS must be an integer >= 1")
    requested = args.threads if args.threads is not None else (cap or 1)
    if requested < 1:
        raise UsageError("--threads must be >= 1")
    return min(requested, cap) if cap else requested


def _spec_num(x) -> str:
    # shortest round-trip form keeps the header readable and exact
    return repr(float(x))


def _spec_string(items: dict) -> str:
    return ";".join(f"{k}={items[k]}" for k in sorted(items))


def _base_spec(args, cfg: OracleConfig) -> dict:
    spec = {"command": args.command}
    for name in ("abs_tol", "rel_tol", "root_tol", "max_iter", "max_panels"):
        spec[f"oracle.{name}"] = _spec_num(getattr(cfg, name)) if "tol" in name else str(getattr(cfg, name))
    return spec


def _grid_spec(args, spec: dict):
    if args.u_list is not None:
        spec["u_list"] = ",".join(_spec_num(u) for u in _parse_u_list(args.u_list))
    elif args.grid is not None:
        start, end, points = _parse_grid(args.grid)
        spec["grid"] = f"{_spec_num(start)}:{_spec_num(end)}:{points}"
    else:
        spec["grid"] = "default-extended" if args.extended else "default"


def _dist_spec(dist, side: Tail, spec: dict):
    spec["dist"] = dist.label()
    spec["side"] = str(side)


def _write(args, spec: dict, header: list[str], rows: list[list]):
    buf = io.StringIO(newline="")
    buf.write(f"# tailquant v{__version__} spec={_spec_string(spec)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if args.output in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _curve_rows(curve) -> list[list]:
    return [[r.u, r.h_ref, r.y_approx, r.rel_err, r.pred, r.ratio, r.error] for r in curve.rows]


_CURVE_HEADER = ["u", "h_ref", "y_approx", "rel_err", "pred_order", "ratio", "error"]


def _parse_method(text: str) -> ApproxMethod:
    try:
        return ApproxMethod.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_quantile(args) -> int:
    dist = _build_dist(args)
    if not 0 < args.u < 1:
        raise UsageError("--u must lie in (0, 1)")
    if args.side is None and len(dist.sides) > 1:
        args.side = "lower" if args.u <= 0.5 else "upper"
    side = _side(args, dist)
    if (side is Tail.LOWER) != (args.u <= 0.5):
        raise UsageError(f"u={fmt(args.u)} is not in the {side} tail")
    method = _parse_method(args.method)
    cfg = _oracle(args)
    v = args.u if side is Tail.LOWER else 1.0 - args.u
    curve = build_error_curve(dist, side, method, [v], cfg)
    spec = _base_spec(args, cfg)
    _dist_spec(dist, side, spec)
    spec["u"] = _spec_num(args.u)
    spec["method"] = str(method)
    _write(args, spec, _CURVE_HEADER, _curve_rows(curve))
    return EXIT_OK


def cmd_error_curve(args) -> int:
    dist = _build_dist(args)
    side = _side(args, dist)
    method = _parse_method(args.method)
    cfg = _oracle(args)
    masses = _tail_masses(args, side)
    curve = build_error_curve(dist, side, method, masses, cfg, workers=_workers(args))
    spec = _base_spec(args, cfg)
    _dist_spec(dist, side, spec)
    _grid_spec(args, spec)
    spec["method"] = str(method)
    _write(args, spec, _CURVE_HEADER, _curve_rows(curve))
    if args.fit:
        try:
            f = fit_order(curve)
            print(f"slope={fmt(f.slope)} intercept={fmt(f.intercept)} r_squared={fmt(f.r_squared)} n={f.n}",
                  file=sys.stderr)
        except InsufficientData as exc:
            print(f"fit unavailable: {exc}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    dist = _build_dist(args)
    side = _side(args, dist)
    names = [t for t in args.methods.split(",") if t.strip()]
    if not names:
        raise UsageError("--methods needs at least one method")
    methods = [_parse_method(t) for t in names]
    labels = [str(m) for m in methods]
    if len(set(labels)) != len(labels):
        raise UsageError("--methods lists a method twice")
    cfg = _oracle(args)
    masses = _tail_masses(args, side)
    curves = compare(dist, side, methods, masses, cfg, workers=_workers(args))
    first = curves[labels[0]]
    rows = []
    for i, base in enumerate(first.rows):
        errors = [f"{lab}: {curves[lab].rows[i].error}" for lab in labels if curves[lab].rows[i].error]
        # oracle failures repeat across methods; report them once
        if not math.isfinite(base.h_ref) and base.error:
            errors = [base.error]
        rows.append([base.u, base.h_ref] + [curves[lab].rows[i].y_approx for lab in labels] + ["; ".join(errors)])
    spec = _base_spec(args, cfg)
    _dist_spec(dist, side, spec)
    _grid_spec(args, spec)
    spec["methods"] = ",".join(labels)
    _write(args, spec, ["u", "h_ref", *labels, "error"], rows)
    return EXIT_OK


def cmd_ladder(args) -> int:
    dist = _build_dist(args)
    side = _side(args, dist)
    cfg = _oracle(args)
    masses = _tail_masses(args, side)
    columns = expansion_ladder(dist, side, masses, cfg, workers=_workers(args))
    spec = _base_spec(args, cfg)
    _dist_spec(dist, side, spec)
    _grid_spec(args, spec)
    _write(args, spec, ["k", "max_ratio"], [[str(c.k), c.max_ratio] for c in columns])
    return EXIT_OK


def cmd_taildep(args) -> int:
    if args.rho is None:
        raise UsageError("taildep requires --rho")
    p = CopulaParams(args.rho)
    cfg = _oracle(args)
    if args.u_list is not None:
        grid = _parse_u_list(args.u_list)
    elif args.grid is not None:
        start, end, points = _parse_grid(args.grid)
        grid = list(np.geomspace(start, end, points))
    else:
        grid = list(default_grid(points=13, start=1e-2, end=1e-8))
    if any(not 0 < u < 0.5 for u in grid):
        raise UsageError("taildep grid values must lie in (0, 1/2)")
    report = copula_report(p, grid, cfg, workers=_workers(args))
    if report.failed > 0.2 * len(report.rows):
        raise TooManyFailures(f"{report.failed} of {len(report.rows)} rows failed")
    spec = _base_spec(args, cfg)
    spec["rho"] = _spec_num(args.rho)
    if args.u_list is not None or args.grid is not None:
        _grid_spec(args, spec)
    else:
        spec["grid"] = "0.01:1e-08:13"
    rows = [[r.u, r.lambda_u, r.lambda_asym, r.lambda_L, r.ratio1, r.ratio2, r.error] for r in report.rows]
    _write(args, spec, ["u", "lambda", "lambda_asym", "lambda_L", "ratio1", "ratio2", "error"], rows)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser, dist: bool = True, grid: bool = True):
    if dist:
        p.add_argument("--dist", required=True, choices=sorted(_FAMILIES))
        p.add_argument("--side", choices=["lower", "upper"])
        for name in _PARAM_FLAGS:
            p.add_argument(f"--{name}", type=float)
    if grid:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--grid", help="geometric grid start:end:points (in u)")
        g.add_argument("--u-list", help="comma-separated u values")
        p.add_argument("--extended", action="store_true", help="default grid down to 1e-100")
        p.add_argument("--threads", type=int, help="worker threads (capped by TAILQUANT_THREADS)")
    p.add_argument("-o", "--output", help="output CSV path (default: stdout)")
    o = p.add_argument_group("oracle overrides")
    o.add_argument("--abs-tol", type=float)
    o.add_argument("--rel-tol", type=float)
    o.add_argument("--root-tol", type=float)
    o.add_argument("--max-iter", type=int)
    o.add_argument("--max-panels", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailquant", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tailquant {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("quantile", help="approximant and oracle quantile at one u")
    _add_common(q, grid=False)
    q.add_argument("--u", type=float, required=True)
    q.add_argument("--method", default="full")
    q.set_defaults(func=cmd_quantile)

    c = sub.add_parser("compare", help="several approximants against one oracle grid")
    _add_common(c)
    c.add_argument("--methods", default="leading,full")
    c.set_defaults(func=cmd_compare)

    e = sub.add_parser("error-curve", help="relative error, predicted order and their ratio")
    _add_common(e)
    e.add_argument("--method", default="full")
    e.add_argument("--fit", action="store_true", help="report the order fit on stderr")
    e.set_defaults(func=cmd_error_curve)

    lad = sub.add_parser("ladder", help="expansion residual over next term, per truncation")
    _add_common(lad)
    lad.set_defaults(func=cmd_ladder)

    t = sub.add_parser("taildep", help="Gaussian copula lower-tail dependence report")
    _add_common(t, dist=False)
    t.add_argument("--rho", type=float)
    t.set_defaults(func=cmd_taildep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooManyFailures as exc:
        print(f"tailquant: {exc}", file=sys.stderr)
        return EXIT_ORACLE if exc.oracle_caused else EXIT_INVALID
    except OracleError as exc:
        print(f"tailquant: oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (UsageError, TailquantError, ValueError) as exc:
        print(f"tailquant: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"tailquant: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
