"""Empirical error orders of the tail approximants.

An :class:`ErrorCurve` pairs every grid point with the oracle quantile, an
approximant, its relative error and the predicted order; the ``ratio``
column is the empirical O-constant, which should stay bounded down the grid.

Grids are given as *tail masses* ``v`` (``u`` for the lower tail, ``1 - u``
for the upper tail), sorted from the bulk towards the tail.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .distributions import Distribution, Normal
from .errors import InsufficientData, RangeError, TailquantError, TooManyFailures
from .gg_tail import (
    FULL,
    ApproxMethod,
    Tail,
    evaluate_log,
    expansion_log,
    max_expansion_terms,
    method_order_log,
    next_term_log,
)
from .oracle import OracleConfig, log_tail_quantile

__all__ = [
    "BaselineVoutier",
    "VOUTIER",
    "ErrorRow",
    "ErrorCurve",
    "OrderFit",
    "LadderColumn",
    "default_grid",
    "decade_grid",
    "reference_quantiles",
    "build_error_curve",
    "compare",
    "fit_order",
    "ladder_depth",
    "expansion_ladder",
    "MAX_FAILED_FRACTION",
]

MAX_FAILED_FRACTION = 0.2
ORACLE_LIMIT_FACTOR = 100.0


@dataclass(frozen=True)
class BaselineVoutier:
    """Rational tail approximation to the standard Normal quantile.

    Valid for ``exp(-37**2 / 2) < u < 0.0465``; evaluation outside that range
    raises :class:`RangeError` rather than extrapolating.
    """

    c3: float = -1.000182518730158122
    c0p: float = 16.682320830719986527
    c1p: float = 4.120411523939115059
    c2p: float = 0.029814187308200211
    d0: float = 7.173787663925508066
    d1: float = 8.759693508958633869
    log_u_min: float = -37.0 ** 2 / 2.0
    u_max: float = 0.0465

    name: ClassVar[str] = "voutier"

    def in_range_log(self, log_u: float) -> bool:
        return self.log_u_min < log_u < math.log(self.u_max)

    def lower_log(self, log_u):
        log_u = np.asarray(log_u, dtype=float)
        if np.any(~((log_u > self.log_u_min) & (log_u < math.log(self.u_max)))):
            raise RangeError("Voutier tail approximation is valid only for exp(-684.5) < u < 0.0465")
        r = np.sqrt(-2.0 * log_u)
        out = self.c3 * r + self.c2p + (self.c1p * r + self.c0p) / (r * r + self.d1 * r + self.d0)
        return float(out) if out.ndim == 0 else out

    def __call__(self, u):
        """Lower-tail quantile approximation at ``u``."""
        return self.lower_log(np.log(np.asarray(u, dtype=float)))

    def evaluate(self, dist: Distribution, side: Tail, log_v):
        if not isinstance(dist, Normal):
            raise RangeError("the Voutier baseline only approximates the standard Normal")
        y = self.lower_log(log_v)
        return y if Tail(side) is Tail.LOWER else -y


VOUTIER = BaselineVoutier()
BASELINES = {VOUTIER.name: VOUTIER}


def default_grid(points: int = 41, start: float = 1e-2, end: float = 1e-12, extended: bool = False) -> np.ndarray:
    """Geometric grid of tail masses; ``extended`` pushes the far end to ``1e-100``."""
    if extended:
        end = 1e-100
    return np.geomspace(start, end, points)


def decade_grid(start: float = 1e-2, end: float = 1e-12) -> np.ndarray:
    """One point per decade, e.g. ``1e-2, 1e-3, ..., 1e-12``."""
    lo, hi = round(math.log10(start)), round(math.log10(end))
    return np.logspace(lo, hi, abs(hi - lo) + 1)


@dataclass(frozen=True)
class ErrorRow:
    u: float
    tail_mass: float
    h_ref: float = math.nan
    y_approx: float = math.nan
    rel_err: float = math.nan
    pred: float = math.nan
    ratio: float = math.nan
    error: str = ""
    oracle_limited: bool = False

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass
class ErrorCurve:
    dist: Distribution
    side: Tail
    method: ApproxMethod
    rows: list[ErrorRow] = field(default_factory=list)

    def column(self, name: str, valid_only: bool = False) -> np.ndarray:
        rows = self.valid_rows() if valid_only else self.rows
        return np.array([getattr(r, name) for r in rows], dtype=float)

    def valid_rows(self) -> list[ErrorRow]:
        """Rows without errors and not limited by oracle precision."""
        return [r for r in self.rows if r.ok and not r.oracle_limited and r.rel_err > 0]

    @property
    def failed(self) -> int:
        return sum(1 for r in self.rows if not r.ok)


def _u_of(side: Tail, v: float) -> float:
    return v if side is Tail.LOWER else 1.0 - v


def _sorted_masses(tail_masses) -> list[float]:
    masses = sorted({float(v) for v in np.atleast_1d(tail_masses)}, reverse=True)
    if not masses or masses[0] >= 1.0 or masses[-1] <= 0.0:
        raise ValueError("tail masses must lie in (0, 1)")
    return masses


def _map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def reference_quantiles(dist: Distribution, side, tail_masses, cfg: OracleConfig | None = None,
                        workers: int = 1) -> list:
    """Oracle quantiles on the grid; failed points come back as the exception instance."""
    side = Tail(side)

    def one(v):
        try:
            return log_tail_quantile(dist, math.log(v), side, cfg).x
        except TailquantError as exc:
            return exc

    return _map(one, _sorted_masses(tail_masses), workers)


def _approx(dist: Distribution, side: Tail, method: ApproxMethod, log_v: float):
    if method.kind == "baseline":
        try:
            baseline = BASELINES[method.name]
        except KeyError:
            raise RangeError(f"unknown baseline {method.name!r}") from None
        y = baseline.evaluate(dist, side, log_v)
        pred = method_order_log(dist.tail_params(side), FULL, log_v)
        return y, pred
    params = dist.tail_params(side)
    return evaluate_log(params, method, log_v), method_order_log(params, method, log_v)


def _fail_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def build_error_curve(dist: Distribution, side, method: ApproxMethod, tail_masses,
                      cfg: OracleConfig | None = None, workers: int = 1, h_ref=None) -> ErrorCurve:
    """One row per grid point: oracle ``h``, approximant ``y``, ``|y/h - 1|``, predicted order, ratio.

    Rows that fail keep their place with an ``error`` message. More than 20%
    failed rows raises :class:`TooManyFailures`. ``h_ref`` may carry
    precomputed output of :func:`reference_quantiles` for the same grid.
    """
    side = Tail(side)
    cfg = cfg or OracleConfig()
    masses = _sorted_masses(tail_masses)
    if h_ref is None:
        h_ref = reference_quantiles(dist, side, masses, cfg, workers)
    limit = ORACLE_LIMIT_FACTOR * max(cfg.root_tol, cfg.rel_tol)
    rows = []
    for v, h in zip(masses, h_ref):
        u = _u_of(side, v)
        if isinstance(h, Exception):
            rows.append(ErrorRow(u, v, error=_fail_text(h)))
            continue
        try:
            y, pred = _approx(dist, side, method, math.log(v))
        except TailquantError as exc:
            rows.append(ErrorRow(u, v, h_ref=h, error=_fail_text(exc)))
            continue
        rel = abs(y / h - 1.0)
        rows.append(ErrorRow(u, v, h, y, rel, pred, rel / pred, oracle_limited=rel < limit))
    curve = ErrorCurve(dist, side, method, rows)
    if curve.failed > MAX_FAILED_FRACTION * len(rows):
        oracle_caused = any(isinstance(h, Exception) for h in h_ref)
        raise TooManyFailures(f"{curve.failed} of {len(rows)} rows failed; first: "
                              + next(r.error for r in rows if r.error), oracle_caused)
    return curve


def compare(dist: Distribution, side, methods, tail_masses, cfg: OracleConfig | None = None,
            workers: int = 1) -> dict[str, ErrorCurve]:
    """Error curves for several methods against a single set of oracle quantiles."""
    masses = _sorted_masses(tail_masses)
    h_ref = reference_quantiles(dist, side, masses, cfg, workers)
    return {str(m): build_error_curve(dist, side, m, masses, cfg, h_ref=h_ref) for m in methods}


@dataclass(frozen=True)
class OrderFit:
    """Least-squares line ``log(rel_err) = slope * log(pred) + intercept``."""

    slope: float
    intercept: float
    r_squared: float
    n: int


def fit_order(curve: ErrorCurve, min_rows: int = 5) -> OrderFit:
    """Regress ``log rel_err`` on ``log pred``; a slope near 1 confirms the predicted order."""
    rows = curve.valid_rows()
    if len(rows) < min_rows:
        raise InsufficientData(f"need at least {min_rows} usable rows, have {len(rows)}")
    x = np.log([r.pred for r in rows])
    y = np.log([r.rel_err for r in rows])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return OrderFit(float(slope), float(intercept), min(max(r2, 0.0), 1.0), len(rows))


@dataclass(frozen=True)
class LadderColumn:
    """``|h - expansion_k| / |next term|`` over the grid, for one truncation ``k``."""

    k: int
    ratios: tuple
    errors: int = 0

    @property
    def max_ratio(self) -> float:
        finite = [r for r in self.ratios if math.isfinite(r)]
        return max(finite) if finite else math.nan


def ladder_depth(params) -> int:
    """Number of displayed terms that are not identically zero for every ``d``.

    The fourth term carries a factor ``1/(2d) - 1/2`` and vanishes when
    ``d = 1``, so exponential-type tails stop at three.
    """
    depth = max_expansion_terms(params)
    return 3 if params.d == 1 else depth


def expansion_ladder(dist: Distribution, side, tail_masses, cfg: OracleConfig | None = None,
                     workers: int = 1) -> list[LadderColumn]:
    """For each truncation ``k``, residual against the oracle divided by the first omitted term.

    The last column is divided by the argument of the displayed remainder.
    Bounded columns mean every retained term pushed the residual to the next order.
    """
    side = Tail(side)
    params = dist.tail_params(side)
    masses = _sorted_masses(tail_masses)
    h_ref = reference_quantiles(dist, side, masses, cfg, workers)
    columns = []
    for k in range(1, ladder_depth(params) + 1):
        ratios, errors = [], 0
        for v, h in zip(masses, h_ref):
            if isinstance(h, Exception):
                ratios.append(math.nan)
                errors += 1
                continue
            try:
                lv = math.log(v)
                ratios.append(abs(h - expansion_log(params, lv, k)) / next_term_log(params, lv, k))
            except TailquantError:
                ratios.append(math.nan)
                errors += 1
        if errors > MAX_FAILED_FRACTION * len(masses):
            oracle_caused = any(isinstance(h, Exception) for h in h_ref)
            raise TooManyFailures(f"{errors} of {len(masses)} ladder rows failed at k={k}", oracle_caused)
        columns.append(LadderColumn(k, tuple(ratios), errors))
    return columns
