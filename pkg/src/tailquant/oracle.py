"""Reference cdf values and quantiles by quadrature and bracketed root-finding.

This is the ground truth the approximants are measured against. Nothing in
here uses the tail asymptotics except to seed the initial quantile bracket,
and turning the seed off only changes the work done, not the answer.

All tail masses are handled as logs, so quantiles are available down to tail
masses around ``1e-300`` and, through :func:`log_tail_quantile`, below that.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .distributions import Distribution, Gamma, NormalMixture
from .errors import BracketFailure, ConvergenceFailure, DomainError, UnderflowRegime
from .gg_tail import Tail, approximant_log, predicted_order_log
from .quadrature import integrate_log, integrate_log_to_infinity

__all__ = [
    "OracleConfig",
    "QuantileResult",
    "log_tail_mass",
    "log_cdf",
    "log_sf",
    "cdf",
    "sf",
    "quantile",
    "tail_quantile",
    "log_tail_quantile",
]

_LOG_TINY = math.log(sys.float_info.min)
_MAX_WIDENINGS = 60


@dataclass(frozen=True)
class OracleConfig:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-12
    root_tol: float = 1e-12
    max_iter: int = 200
    max_panels: int = 4000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.root_tol > 0):
            raise ValueError("oracle tolerances must be positive")
        if self.max_iter < 10:
            raise ValueError("max_iter must be at least 10")

    @property
    def quad(self) -> dict:
        return {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol, "max_panels": self.max_panels}


DEFAULT = OracleConfig()


@dataclass(frozen=True)
class QuantileResult:
    """``x`` with ``achieved_residual = |P(tail at x) - v| / v`` for the matched tail mass ``v``."""

    x: float
    achieved_residual: float
    iterations: int
    widenings: int = 0
    seeded: bool = field(default=False, compare=False)


def efold_length(logf, x: float, lower_bound: float = -math.inf) -> float:
    """Local e-folding length ``1 / |d logf / dx|`` at ``x``, clipped to ``[1e-12, 1e3]``."""
    h = 1e-4 * max(1.0, abs(x))
    if x - h <= lower_bound:
        h = 0.5 * (x - lower_bound)
    slope = (float(logf(x + h)) - float(logf(x - h))) / (2.0 * h)
    if not math.isfinite(slope) or slope == 0.0:
        return 1.0
    return min(max(1.0 / abs(slope), 1e-12), 1e3)


def _direct_log_mass(dist: Distribution, x: float, side: Tail, cfg: OracleConfig) -> float:
    if isinstance(dist, NormalMixture):
        return dist.log_tail_mass(x, side, **cfg.quad)
    if side is Tail.LOWER:
        if isinstance(dist, Gamma):
            # t = x w^(1/alpha) removes the t^(alpha-1) endpoint behaviour
            inv_a = 1.0 / dist.alpha
            log_jac = math.log(x * inv_a)

            def mapped(w):
                with np.errstate(divide="ignore"):
                    return dist.log_pdf(x * w ** inv_a) + log_jac + (inv_a - 1.0) * np.log(w)

            return integrate_log(mapped, 0.0, 1.0, **cfg.quad)
        scale = efold_length(dist.log_pdf, x, dist.support[0])
        return integrate_log_to_infinity(dist.log_pdf, x, -1, scale, **cfg.quad)
    return integrate_log_to_infinity(dist.log_pdf, x, +1, efold_length(dist.log_pdf, x, dist.support[0]), **cfg.quad)


def log_tail_mass(dist: Distribution, x: float, side=Tail.LOWER, cfg: OracleConfig | None = None) -> float:
    """``log P(X <= x)`` for the lower side, ``log P(X > x)`` for the upper side.

    The side away from ``x`` is integrated directly; when ``x`` lies past the
    distribution's center the complement is used instead.
    """
    cfg = cfg or DEFAULT
    side = Tail(side)
    x = float(x)
    lo, hi = dist.support
    if x <= lo:
        return -math.inf if side is Tail.LOWER else 0.0
    if x >= hi:
        return 0.0 if side is Tail.LOWER else -math.inf
    if isinstance(dist, NormalMixture):
        return _direct_log_mass(dist, x, side, cfg)
    beyond = x > dist.center if side is Tail.LOWER else x < dist.center
    if not beyond:
        return _direct_log_mass(dist, x, side, cfg)
    other = Tail.UPPER if side is Tail.LOWER else Tail.LOWER
    return math.log1p(-math.exp(_direct_log_mass(dist, x, other, cfg)))


def log_cdf(dist: Distribution, x: float, cfg: OracleConfig | None = None) -> float:
    return log_tail_mass(dist, x, Tail.LOWER, cfg)


def log_sf(dist: Distribution, x: float, cfg: OracleConfig | None = None) -> float:
    return log_tail_mass(dist, x, Tail.UPPER, cfg)


def _linear(log_p: float) -> float:
    if log_p < _LOG_TINY:
        raise UnderflowRegime(f"probability exp({log_p:.6g}) is below the normal double range; use the log API")
    return math.exp(log_p)


def cdf(dist: Distribution, x: float, cfg: OracleConfig | None = None) -> float:
    """``P(X <= x)``."""
    return _linear(log_cdf(dist, x, cfg))


def sf(dist: Distribution, x: float, cfg: OracleConfig | None = None) -> float:
    """``P(X > x)``."""
    return _linear(log_sf(dist, x, cfg))


def _seed_bracket(dist: Distribution, side: Tail, log_v: float):
    if side not in dist.sides:
        return None
    params = dist.tail_params(side)
    try:
        y = approximant_log(params, log_v)
        p = predicted_order_log(params, log_v)
    except DomainError:
        return None
    ends = sorted((y * (1.0 + 10.0 * p), y * (1.0 - 10.0 * p)))
    if ends[0] <= dist.support[0]:
        return None
    return ends[0], ends[1]


def _at_resolution(g, x: float, ulps: int = 4) -> bool:
    # the root sits between neighbouring doubles; no x can do better
    lo, hi = x, x
    for _ in range(ulps):
        lo, hi = math.nextafter(lo, -math.inf), math.nextafter(hi, math.inf)
    return g(lo) <= 0.0 <= g(hi)


def log_tail_quantile(dist: Distribution, log_v: float, side=Tail.LOWER, cfg: OracleConfig | None = None,
                      seed: bool = True) -> QuantileResult:
    """Solve ``log P(tail at x) = log_v`` for ``x``.

    The bracket starts from the tail approximant (when ``seed`` and the pair
    is supported) and is widened geometrically until it straddles the root;
    Brent's method then refines it without derivative information.
    """
    cfg = cfg or DEFAULT
    side = Tail(side)
    log_v = float(log_v)
    if not log_v < 0:
        raise DomainError("tail mass must lie in (0, 1)")
    sgn = 1.0 if side is Tail.LOWER else -1.0
    calls = 0

    def g(x):
        nonlocal calls
        calls += 1
        return sgn * (log_tail_mass(dist, x, side, cfg) - log_v)

    support_lo = dist.support[0]
    bracket = _seed_bracket(dist, side, log_v) if seed else None
    seeded = bracket is not None
    if bracket is None:
        c = dist.center
        bracket = (c - 1.0, c + 1.0) if not math.isfinite(support_lo) else (0.5 * c, 2.0 * c)
    lo, hi = bracket
    g_lo, g_hi = g(lo), g(hi)
    widenings = 0
    step = max(hi - lo, 1e-3 * max(1.0, abs(lo), abs(hi)))
    while g_lo > 0 or g_hi < 0:
        if widenings >= _MAX_WIDENINGS:
            raise BracketFailure(f"no bracket for log tail mass {log_v:.6g} after {widenings} widenings")
        widenings += 1
        if g_lo > 0:
            new_lo = lo - step
            if new_lo <= support_lo:
                new_lo = support_lo + 0.5 * (lo - support_lo)
            hi, g_hi = lo, g_lo
            lo, g_lo = new_lo, g(new_lo)
        else:
            lo, g_lo = hi, g_hi
            hi = hi + step
            g_hi = g(hi)
        step *= 2.0
    if g_lo == 0:
        x = lo
    elif g_hi == 0:
        x = hi
    else:
        try:
            x, info = brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                             maxiter=cfg.max_iter, full_output=True, disp=False)
        except ValueError as exc:
            raise BracketFailure(str(exc)) from exc
        if not info.converged:
            raise ConvergenceFailure(f"root-finding did not converge: {info.flag}")
    delta = log_tail_mass(dist, x, side, cfg) - log_v
    residual = abs(math.expm1(delta))
    if residual > cfg.root_tol and not _at_resolution(g, x):
        raise ConvergenceFailure(f"quantile residual {residual:.3e} exceeds root_tol {cfg.root_tol:.1e}")
    return QuantileResult(float(x), residual, calls, widenings, seeded)


def tail_quantile(dist: Distribution, v: float, side=Tail.LOWER, cfg: OracleConfig | None = None,
                  seed: bool = True) -> QuantileResult:
    """Quantile at tail mass ``v`` (``u`` for the lower side, ``1 - u`` for the upper)."""
    if not 0.0 < v < 1.0:
        raise DomainError("tail mass must lie in (0, 1)")
    return log_tail_quantile(dist, math.log(v), side, cfg, seed)


def quantile(dist: Distribution, u: float, cfg: OracleConfig | None = None, side=None,
             seed: bool = True) -> QuantileResult:
    """Reference quantile ``h(u)``.

    By default the smaller tail is matched: ``P(X <= x) = u`` when ``u <= 1/2``
    and ``P(X > x) = 1 - u`` otherwise, so the residual is relative to the tail
    mass that was matched.
    """
    if not 0.0 < u < 1.0:
        raise DomainError("u must lie in (0, 1)")
    if side is None:
        side = Tail.LOWER if u <= 0.5 else Tail.UPPER
    side = Tail(side)
    v = u if side is Tail.LOWER else 1.0 - u
    return tail_quantile(dist, v, side, cfg, seed)
