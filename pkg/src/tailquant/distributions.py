"""Parametric families with Generalised Gamma-type tails.

Each family knows its log-density and the tail constants of the side(s) it
supports. The Variance-Gamma and Skew-Slash families are Normal variance-mean
mixtures; their densities are computed by quadrature over the mixing
variable rather than from Bessel-function closed forms, so the reference
computations never lean on the asymptotics being tested.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, log_ndtr

from .errors import DomainError, InvalidParams, SupportError, UnsupportedTail
from .gg_tail import GGTailParams, Tail, model_log_tail
from .quadrature import integrate_log

__all__ = [
    "Distribution",
    "Normal",
    "SkewNormal",
    "Gamma",
    "VarianceGamma",
    "SkewSlash",
    "NormalMixture",
    "tail_params",
    "log_pdf",
    "tail_cdf_model",
    "log_tail_cdf_model",
    "supported_sides",
    "SUPPORTED_PAIRS",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_MODEL_WARN_ABS_X = 2.0


def _log_phi(z):
    return -0.5 * z * z - _LOG_SQRT_2PI


class Distribution:
    """Common interface; subclasses are frozen dataclasses."""

    name: str = ""
    sides: tuple[Tail, ...] = ()
    support: tuple[float, float] = (-math.inf, math.inf)

    def log_pdf(self, x):
        raise NotImplementedError

    def tail_params(self, side) -> GGTailParams:
        side = Tail(side)
        if side not in self.sides:
            raise UnsupportedTail(f"{self.label()} has no {side} tail model")
        return self._tail_params(side)

    def _tail_params(self, side: Tail) -> GGTailParams:
        raise NotImplementedError

    @property
    def center(self) -> float:
        """A point in the bulk; reference integrals are split here."""
        return 0.0

    def label(self) -> str:
        """Canonical ``name(k=v,...)`` string used in outputs."""
        fields = getattr(self, "__dataclass_fields__", {})
        args = ",".join(f"{k}={getattr(self, k)!r}" for k in fields)
        return f"{self.name}({args})"

    def _check_support(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        if (math.isfinite(lo) and np.any(x <= lo)) or (math.isfinite(hi) and np.any(x >= hi)):
            raise SupportError(f"{self.name} density evaluated outside its support")
        return x


@dataclass(frozen=True)
class Normal(Distribution):
    name = "normal"
    sides = (Tail.LOWER, Tail.UPPER)

    def log_pdf(self, x):
        return _log_phi(np.asarray(x, dtype=float))

    def _tail_params(self, side):
        return GGTailParams(1.0 / math.sqrt(2.0 * math.pi), -1.0, 0.5, 2.0, 2.0, side)


@dataclass(frozen=True)
class SkewNormal(Distribution):
    """Standard Skew-Normal with density ``2 phi(x) Phi(lam x)``; ``lam`` must be nonzero."""

    lam: float
    name = "skewnormal"
    sides = (Tail.LOWER,)

    def __post_init__(self):
        if not math.isfinite(self.lam) or self.lam == 0:
            raise InvalidParams("SkewNormal needs a finite nonzero lam; use Normal for lam = 0")

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return math.log(2.0) + _log_phi(x) + log_ndtr(self.lam * x)

    def _tail_params(self, side):
        lam = self.lam
        if lam > 0:
            return GGTailParams(1.0 / (math.pi * lam * (1 + lam * lam)), -2.0, (1 + lam * lam) / 2.0, 2.0, 2.0, side)
        return GGTailParams(2.0 / math.sqrt(2.0 * math.pi), -1.0, 0.5, 2.0, 2.0, side)


@dataclass(frozen=True)
class Gamma(Distribution):
    """Gamma with shape ``alpha`` and rate ``beta``."""

    alpha: float
    beta: float = 1.0
    name = "gamma"
    sides = (Tail.UPPER,)
    support = (0.0, math.inf)

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0 and math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise InvalidParams("Gamma needs alpha > 0 and beta > 0")

    @property
    def center(self):
        return self.alpha / self.beta

    def log_pdf(self, x):
        x = self._check_support(x)
        a, b = self.alpha, self.beta
        return a * math.log(b) - gammaln(a) + (a - 1.0) * np.log(x) - b * x

    def _tail_params(self, side):
        a, b = self.alpha, self.beta
        amp = math.exp((a - 1.0) * math.log(b) - gammaln(a))
        return GGTailParams(amp, a - 1.0, b, 1.0, 1.0, side)


class NormalMixture(Distribution):
    """``X | Y ~ N(mean(Y), var(Y))``; integrals run over ``s = log Y``.

    Subclasses provide :meth:`mixing` returning, for an array of ``s``, the log
    mixing density in ``s``-space together with the conditional mean and
    standard deviation, plus the admissible ``s`` range in ``s_range``.
    """

    s_range: tuple[float, float] = (-40.0, 40.0)
    s_limits: tuple[float, float] = (-700.0, 700.0)

    def mixing(self, s):
        raise NotImplementedError

    def _log_mixture(self, log_kernel, drop: float = 60.0, **tol) -> float:
        # bracket the bulk of the s-integrand on a coarse grid, then integrate there
        lo, hi = self.s_range
        floor, ceil = self.s_limits
        while True:
            step = max(0.05, (hi - lo) / 4000.0)
            grid = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
                vals = log_kernel(grid)
            vals = np.where(np.isnan(vals), -np.inf, vals)
            peak = np.max(vals)
            if peak == -np.inf:
                return -math.inf
            grow_lo = vals[0] > peak - drop and lo > floor
            grow_hi = vals[-1] > peak - drop and hi < ceil
            if not (grow_lo or grow_hi):
                break
            width = hi - lo
            if grow_lo:
                lo = max(floor, lo - width)
            if grow_hi:
                hi = min(ceil, hi + width)
        alive = np.nonzero(vals > peak - drop)[0]
        a = grid[max(alive[0] - 1, 0)]
        b = grid[min(alive[-1] + 1, grid.size - 1)]
        return integrate_log(log_kernel, a, b, **tol)

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        flat = [self._log_pdf_scalar(float(v)) for v in x.ravel()]
        out = np.array(flat).reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def _log_pdf_scalar(self, x: float, **tol) -> float:
        def kernel(s):
            log_w, mean, sd = self.mixing(s)
            return log_w + _log_phi((x - mean) / sd) - np.log(sd)

        return self._log_mixture(kernel, **tol)

    def log_tail_mass(self, x: float, side: Tail, **tol) -> float:
        """``log P(X <= x)`` (lower) or ``log P(X > x)`` (upper) as one mixture integral."""
        sgn = 1.0 if Tail(side) is Tail.LOWER else -1.0

        def kernel(s):
            log_w, mean, sd = self.mixing(s)
            return log_w + log_ndtr(sgn * (x - mean) / sd)

        return self._log_mixture(kernel, **tol)


@dataclass(frozen=True)
class VarianceGamma(NormalMixture):
    """``X | Y ~ N(theta Y, Y)`` with ``Y ~ Gamma(1/nu, rate 1/nu)``."""

    theta: float
    nu: float
    name = "vg"
    sides = (Tail.LOWER,)
    s_range = (-60.0, 15.0)
    s_limits = (-700.0, 30.0)

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.nu > 0 and math.isfinite(self.nu)):
            raise InvalidParams("VarianceGamma needs finite theta and nu > 0")

    @property
    def center(self):
        return self.theta

    def mixing(self, s):
        k = 1.0 / self.nu
        y = np.exp(s)
        # Gamma(k, rate k) density in y, times dy/ds = y
        log_w = k * math.log(k) - gammaln(k) + k * s - k * y
        return log_w, self.theta * y, np.sqrt(y)

    def _tail_params(self, side):
        nu, th = self.nu, self.theta
        root = math.sqrt(2.0 / nu + th * th)
        rate = root + th
        log_den = (1.0 / nu) * math.log(nu) + gammaln(1.0 / nu) + (1.0 / (2.0 * nu)) * math.log(2.0 / nu + th * th) + math.log(rate)
        return GGTailParams(math.exp(-log_den), 1.0 / nu - 1.0, rate, 1.0, 1.0, side)


@dataclass(frozen=True)
class SkewSlash(NormalMixture):
    """``X | Y ~ N(theta / Y, 1 / Y)`` with ``Y ~ Beta(lam, 1)``; ``theta > 0``.

    The conditional variance is ``1/Y``; this is the orientation whose lower
    tail is ``(lam theta**(lam-1) / 2) |x|**-(lam+1) exp(-2 theta |x|)``.
    """

    theta: float
    lam: float
    name = "skewslash"
    sides = (Tail.LOWER,)
    s_range = (-60.0, 0.0)
    s_limits = (-700.0, 0.0)

    def __post_init__(self):
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise InvalidParams("SkewSlash requires theta > 0")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise InvalidParams("SkewSlash requires lam > 0")

    def mixing(self, s):
        y = np.exp(s)
        # Beta(lam, 1) density lam y^(lam-1), times dy/ds = y
        log_w = math.log(self.lam) + self.lam * s
        return log_w, self.theta / y, 1.0 / np.sqrt(y)

    def _tail_params(self, side):
        lam, th = self.lam, self.theta
        return GGTailParams(lam * th ** (lam - 1.0) / 2.0, -(lam + 1.0), 2.0 * th, 1.0, 1.0, side)


SUPPORTED_PAIRS = (
    ("normal", Tail.LOWER),
    ("normal", Tail.UPPER),
    ("skewnormal", Tail.LOWER),
    ("gamma", Tail.UPPER),
    ("vg", Tail.LOWER),
    ("skewslash", Tail.LOWER),
)


def supported_sides(dist: Distribution) -> tuple[Tail, ...]:
    return dist.sides


def tail_params(dist: Distribution, side) -> GGTailParams:
    """Tail constants of ``dist`` on ``side``; raises ``UnsupportedTail`` otherwise."""
    return dist.tail_params(side)


def log_pdf(dist: Distribution, x):
    return dist.log_pdf(x)


def log_tail_cdf_model(dist: Distribution, side, x):
    """Log of ``a |x|**b exp(-c |x|**d)`` for the distribution's tail."""
    params = dist.tail_params(side)
    if np.any(np.abs(np.asarray(x, dtype=float)) < _MODEL_WARN_ABS_X):
        warnings.warn("tail model evaluated at |x| < 2, outside the deep tail", RuntimeWarning, stacklevel=2)
    try:
        return model_log_tail(params, x)
    except DomainError:
        raise DomainError(f"x must be in the {params.side} tail") from None


def tail_cdf_model(dist: Distribution, side, x):
    """Leading-factor tail mass ``a |x|**b exp(-c |x|**d)``; not a true cdf."""
    out = np.exp(log_tail_cdf_model(dist, side, x))
    return float(out) if np.ndim(out) == 0 else out
