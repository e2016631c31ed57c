"""Generalised Gamma-type tail model and its closed-form quantile approximants.

A cdf ``g`` has a lower Generalised Gamma-type (GG) tail when::

    g(x) = a |x|**b * exp(-c |x|**d) * (1 + O(|x|**-e)),     x -> -inf

and an upper one when ``1 - g(x)`` has the same form as ``x -> +inf``.

Every routine here has a ``u``-based public form and a companion that works on
``log_v``, the natural log of the tail mass (``v = u`` in the lower tail,
``v = 1 - u`` in the upper tail). The log form is what the analysis code uses:
it keeps upper-tail grids exact and reaches tail masses far below the
smallest double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, InvalidParams

__all__ = [
    "Tail",
    "GGTailParams",
    "ApproxMethod",
    "LEADING",
    "FULL",
    "OrderPrediction",
    "gg_lower_approx",
    "gg_upper_approx",
    "gg_lower_expansion",
    "gg_upper_expansion",
    "leading_term",
    "predicted_order",
    "predicted_order_leading",
    "order_prediction",
    "approximant_log",
    "leading_term_log",
    "expansion_log",
    "expansion_terms_log",
    "next_term_log",
    "max_expansion_terms",
    "predicted_order_log",
    "predicted_order_leading_log",
    "evaluate_log",
    "method_order_log",
    "model_log_tail",
    "log_tail_of",
]


class Tail(str, Enum):
    LOWER = "lower"
    UPPER = "upper"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class GGTailParams:
    """The five tail constants ``(a, b, c, d, e)`` together with the tail side."""

    a: float
    b: float
    c: float
    d: float
    e: float
    side: Tail = Tail.LOWER

    def __post_init__(self):
        for name in ("a", "c", "d", "e"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidParams(f"{name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.b):
            raise InvalidParams(f"b must be finite, got {self.b!r}")
        object.__setattr__(self, "side", Tail(self.side))
        for name in ("a", "b", "c", "d", "e"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def degenerate_b(self) -> bool:
        """True when the power factor is absent and the tail inverts exactly."""
        return self.b == 0.0

    @property
    def sign(self) -> float:
        return -1.0 if self.side is Tail.LOWER else 1.0


@dataclass(frozen=True)
class ApproxMethod:
    """Selector over the approximants.

    ``kind`` is one of ``"leading"``, ``"full"``, ``"expansion"`` (with ``k``
    retained terms, 1 to 4) or ``"baseline"`` (with a ``name``).
    """

    kind: str
    k: int | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in ("leading", "full", "expansion", "baseline"):
            raise ValueError(f"unknown method kind {self.kind!r}")
        if self.kind == "expansion" and (self.k is None or not 1 <= self.k <= 4):
            raise ValueError("expansion order k must be in 1..4")
        if self.kind == "baseline" and not self.name:
            raise ValueError("baseline methods need a name")

    @classmethod
    def expansion(cls, k: int) -> ApproxMethod:
        return cls("expansion", k=int(k))

    @classmethod
    def baseline(cls, name: str) -> ApproxMethod:
        return cls("baseline", name=name.lower())

    @classmethod
    def parse(cls, text: str) -> ApproxMethod:
        """Parse ``leading``, ``full``, ``expansion3`` or a baseline name such as ``voutier``."""
        t = text.strip().lower()
        if t in ("leading", "y*", "ystar"):
            return LEADING
        if t in ("full", "y"):
            return FULL
        if t.startswith("expansion"):
            rest = t[len("expansion"):].lstrip(":=")
            try:
                return cls.expansion(int(rest))
            except ValueError:
                raise ValueError(f"bad expansion order in {text!r}") from None
        if t.startswith("baseline:"):
            t = t.split(":", 1)[1]
        if not t:
            raise ValueError("empty method name")
        return cls.baseline(t)

    def __str__(self) -> str:
        if self.kind == "expansion":
            return f"expansion{self.k}"
        if self.kind == "baseline":
            return str(self.name)
        return self.kind


LEADING = ApproxMethod("leading")
FULL = ApproxMethod("full")


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def log_tail_of(params: GGTailParams, u):
    """Log tail mass for probability ``u``: ``log u`` (lower) or ``log(1 - u)`` (upper)."""
    u = np.asarray(u, dtype=float)
    if np.any(~((u > 0) & (u < 1))):
        raise DomainError("u must lie strictly inside (0, 1)")
    return np.log(u) if params.side is Tail.LOWER else np.log1p(-u)


def _regime(log_v):
    # |log v| > 1 keeps log|log v| positive and every displayed term real
    log_v = np.asarray(log_v, dtype=float)
    if np.any(~(log_v < -1.0)):
        raise DomainError("tail mass must satisfy |log v| > 1 (v < 1/e)")
    return log_v


def _require_side(params: GGTailParams, side: Tail):
    if params.side is not side:
        raise InvalidParams(f"expected {side} tail parameters, got {params.side}")


# Approximants

def approximant_log(params: GGTailParams, log_v):
    """Full closed-form approximant ``y`` as a function of the log tail mass."""
    p = params
    log_v = _regime(log_v)
    if p.degenerate_b:
        # a|x|^0 exp(-c|x|^d) inverts exactly
        w = (math.log(p.a) - log_v) / p.c
        if np.any(~(w > 0)):
            raise DomainError("tail mass must be below a when b = 0")
        return _scalar_or_array(p.sign * w ** (1.0 / p.d))
    r = p.d / p.b
    k0 = math.log(p.c * p.d / abs(p.b))
    inner = k0 + r * log_v
    # asymptotically inner -> +inf (b < 0) or -inf (b > 0); off that branch y is not monotone in u
    on_branch = inner > 1.0 if p.b < 0 else inner < 0.0
    if np.any(~on_branch):
        raise DomainError("inner logarithm is not yet on its asymptotic branch; u is too close to the bulk")
    numerator = k0 + r * (log_v - math.log(p.a))
    bracket = (-p.b / (p.c * p.d)) * (numerator - np.log(np.abs(inner)))
    if np.any(~(bracket > 0)):
        raise DomainError("approximant bracket is not positive; u is outside the asymptotic regime")
    return _scalar_or_array(p.sign * bracket ** (1.0 / p.d))


def leading_term_log(params: GGTailParams, log_v):
    log_v = _regime(log_v)
    return _scalar_or_array(params.sign * (-log_v / params.c) ** (1.0 / params.d))


def gg_lower_approx(params: GGTailParams, u):
    """Lower-tail approximant ``y(u) < 0``.

    Examples
    --------
    >>> normal = GGTailParams(1 / math.sqrt(2 * math.pi), -1, 0.5, 2, 2)
    >>> round(gg_lower_approx(normal, 0.01), 4)
    -2.2699
    """
    _require_side(params, Tail.LOWER)
    return approximant_log(params, log_tail_of(params, u))


def gg_upper_approx(params: GGTailParams, u):
    """Upper-tail approximant ``y(u) > 0``; mirror of :func:`gg_lower_approx` in ``1 - u``."""
    _require_side(params, Tail.UPPER)
    return approximant_log(params, log_tail_of(params, u))


def leading_term(params: GGTailParams, u):
    """Dominant term ``-/+ (-(1/c) log v)**(1/d)`` of the expansion."""
    return leading_term_log(params, log_tail_of(params, u))


# Series expansion

def max_expansion_terms(params: GGTailParams) -> int:
    return 4 if params.d <= params.e else 3


def _nonzero_terms(p: GGTailParams) -> list[bool]:
    b_log_ratio = p.d * math.log(p.a) - p.b * math.log(p.c)
    return [
        True,
        p.b != 0,
        not math.isclose(b_log_ratio, 0.0, abs_tol=1e-14),
        p.b != 0 and p.d != 1,
    ]


def expansion_terms_log(params: GGTailParams, log_v) -> list:
    """The four displayed expansion terms (signed), leading term first.

    ``b * log(a**(d/b) / c)`` is evaluated as ``d log a - b log c`` so the
    third term stays finite when ``b = 0``.
    """
    p = params
    log_v = _regime(log_v)
    big_l = -log_v
    loglog = np.log(big_l)
    w = big_l / p.c
    d = p.d
    scale = p.c * d * d * w ** (1.0 - 1.0 / d)
    b_log_ratio = d * math.log(p.a) - p.b * math.log(p.c)
    terms = [
        -(w ** (1.0 / d)),
        -p.b * loglog / scale,
        -b_log_ratio / scale,
        -(p.b ** 2) * (0.5 / d - 0.5) * loglog ** 2 / (p.c ** 2 * d ** 3 * w ** (2.0 - 1.0 / d)),
    ]
    return [-t for t in terms] if p.side is Tail.UPPER else terms


def _remainder_log(p: GGTailParams, log_v):
    big_l = -np.asarray(log_v, dtype=float)
    if p.d <= p.e:
        return np.log(big_l) / big_l ** (2.0 - 1.0 / p.d)
    return big_l ** -(p.e / p.d + 1.0 - 1.0 / p.d)


def expansion_log(params: GGTailParams, log_v, k: int):
    """Partial sum of the expansion through ``k`` terms, summed smallest first."""
    kmax = max_expansion_terms(params)
    if not 1 <= k <= kmax:
        raise InvalidParams(f"expansion order must be in 1..{kmax} for these parameters, got {k}")
    terms = np.array(np.broadcast_arrays(*expansion_terms_log(params, log_v)[:k]), dtype=float)
    order = np.argsort(np.abs(terms), axis=0)
    total = np.take_along_axis(terms, order, axis=0).sum(axis=0)
    return _scalar_or_array(total)


def next_term_log(params: GGTailParams, log_v, k: int):
    """Magnitude of the first non-vanishing term after the first ``k``.

    Falls back to the argument of the displayed remainder when no retained
    term is left.
    """
    p = params
    kmax = max_expansion_terms(p)
    terms = expansion_terms_log(p, log_v)
    live = _nonzero_terms(p)
    for j in range(k, kmax):
        if live[j]:
            return _scalar_or_array(np.abs(terms[j]))
    return _scalar_or_array(_remainder_log(p, log_v))


def gg_lower_expansion(params: GGTailParams, u, k: int):
    """Lower-tail expansion truncated after ``k`` terms (k <= 4, or 3 when d > e)."""
    _require_side(params, Tail.LOWER)
    return expansion_log(params, log_tail_of(params, u), k)


def gg_upper_expansion(params: GGTailParams, u, k: int):
    _require_side(params, Tail.UPPER)
    return expansion_log(params, log_tail_of(params, u), k)


# Error orders

@dataclass(frozen=True)
class OrderPrediction:
    """Relative-error scale of the full approximant.

    ``kind`` is ``"loglog_over_logsq"`` (``log|log v| / (log v)**2``, when
    d <= e) or ``"power_of_inverse_log"`` (``|log v|**-power``, when d > e).
    """

    kind: str
    power: float | None
    side: Tail

    def value_at_log(self, log_v):
        big_l = -_regime(log_v)
        if self.kind == "loglog_over_logsq":
            return _scalar_or_array(np.log(big_l) / big_l ** 2)
        return _scalar_or_array(big_l ** -self.power)

    def value_at(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0) & (u < 1))):
            raise DomainError("u must lie strictly inside (0, 1)")
        log_v = np.log(u) if self.side is Tail.LOWER else np.log1p(-u)
        return self.value_at_log(log_v)


def order_prediction(params: GGTailParams) -> OrderPrediction:
    if params.d <= params.e:
        return OrderPrediction("loglog_over_logsq", None, params.side)
    return OrderPrediction("power_of_inverse_log", params.e / params.d + 1.0, params.side)


def predicted_order_log(params: GGTailParams, log_v):
    return order_prediction(params).value_at_log(log_v)


def predicted_order_leading_log(params: GGTailParams, log_v):
    big_l = -_regime(log_v)
    return _scalar_or_array(np.log(big_l) / big_l)


def predicted_order(params: GGTailParams, u):
    """Predicted relative error of the full approximant at ``u``."""
    return predicted_order_log(params, log_tail_of(params, u))


def predicted_order_leading(params: GGTailParams, u):
    """Predicted relative error of the leading term: ``log|log v| / |log v|``."""
    return predicted_order_leading_log(params, log_tail_of(params, u))


def evaluate_log(params: GGTailParams, method: ApproxMethod, log_v):
    """Evaluate any non-baseline method at the log tail mass."""
    if method.kind == "leading":
        return leading_term_log(params, log_v)
    if method.kind == "full":
        return approximant_log(params, log_v)
    if method.kind == "expansion":
        return expansion_log(params, log_v, method.k)
    raise ValueError(f"baseline method {method} is not a tail-model approximant")


def method_order_log(params: GGTailParams, method: ApproxMethod, log_v):
    """Predicted relative error of ``method`` on the same scale as its output.

    Expansions use the size of the first omitted term relative to the leading
    term; baselines are reported against the full approximant's order.
    """
    if method.kind == "leading":
        return predicted_order_leading_log(params, log_v)
    if method.kind == "expansion":
        lead = np.abs(leading_term_log(params, log_v))
        return _scalar_or_array(next_term_log(params, log_v, method.k) / lead)
    return predicted_order_log(params, log_v)


def model_log_tail(params: GGTailParams, x):
    """``log(a |x|**b exp(-c |x|**d))``, the tail model without its error factor."""
    x = np.asarray(x, dtype=float)
    bad = (x >= 0) if params.side is Tail.LOWER else (x <= 0)
    if np.any(bad):
        raise DomainError(f"x must be on the {params.side} side of zero")
    ax = np.abs(x)
    return _scalar_or_array(math.log(params.a) + params.b * np.log(ax) - params.c * ax ** params.d)
