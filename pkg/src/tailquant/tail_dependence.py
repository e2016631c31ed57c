"""Lower-tail dependence of the bivariate Gaussian copula.

For correlation ``rho`` the auxiliary function

    lambda(u) = 2 Phi(Phi^-1(u) sqrt((1 - rho) / (1 + rho)))

is regularly varying with index ``theta = (1 - rho) / (1 + rho)``, and the
copula diagonal ratio ``lambda_L(u) = C(u, u) / u`` behaves like
``lambda(u) / (theta + 1)``. This module evaluates all three quantities with
the reference oracle and tabulates how quickly the asymptotic relations set in.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr

from .distributions import Normal
from .errors import DomainError, InvalidParams, TailquantError
from .oracle import OracleConfig, cdf, efold_length, log_tail_quantile
from .quadrature import integrate_log_to_infinity

__all__ = [
    "CopulaParams",
    "CopulaRow",
    "CopulaReport",
    "lambda_u",
    "lambda_asymptotic",
    "lambda_L_u",
    "copula_cdf",
    "copula_diagonal",
    "copula_report",
]

_NORMAL = Normal()
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class CopulaParams:
    rho: float

    def __post_init__(self):
        if not (-1.0 < self.rho < 1.0):
            raise InvalidParams(f"rho must lie in (-1, 1), got {self.rho!r}")

    @property
    def theta(self) -> float:
        """Regular-variation index ``(1 - rho) / (1 + rho)``."""
        return (1.0 - self.rho) / (1.0 + self.rho)


def _normal_quantile(u: float, cfg: OracleConfig | None) -> float:
    if not 0.0 < u < 1.0:
        raise DomainError("u must lie in (0, 1)")
    if u <= 0.5:
        return log_tail_quantile(_NORMAL, math.log(u), "lower", cfg).x
    return log_tail_quantile(_NORMAL, math.log1p(-u), "upper", cfg).x


def lambda_u(p: CopulaParams, u: float, cfg: OracleConfig | None = None) -> float:
    """``2 Phi(Phi^-1(u) sqrt(theta))`` using the oracle for both Phi and its inverse."""
    if not 0.0 < u < 0.5:
        raise DomainError("lambda(u) needs 0 < u < 1/2")
    x = _normal_quantile(u, cfg)
    return 2.0 * cdf(_NORMAL, x * math.sqrt(p.theta), cfg)


def lambda_asymptotic(p: CopulaParams, u: float) -> float:
    """``u**theta * L(u)`` with ``L(u) = 2 sqrt((1+rho)/(1-rho)) (-4 pi log u)**(-rho/(1+rho))``."""
    if not 0.0 < u < math.exp(-1.0):
        raise DomainError("the asymptotic law needs 0 < u < 1/e")
    rho = p.rho
    log_u = math.log(u)
    log_slow = math.log(2.0) + 0.5 * math.log((1.0 + rho) / (1.0 - rho)) \
        - rho / (1.0 + rho) * math.log(-4.0 * math.pi * log_u)
    return math.exp(p.theta * log_u + log_slow)


def copula_cdf(p: CopulaParams, u1: float, u2: float, cfg: OracleConfig | None = None) -> float:
    """``C(u1, u2) = P(Z1 <= Phi^-1(u1), Z2 <= Phi^-1(u2))``.

    Integrates over the first coordinate, conditioning the second on it:
    ``int_{-inf}^{x1} phi(t) Phi((x2 - rho t) / sqrt(1 - rho^2)) dt``.
    """
    cfg = cfg or OracleConfig()
    x1 = _normal_quantile(u1, cfg)
    x2 = _normal_quantile(u2, cfg)
    rho = p.rho
    s = math.sqrt(1.0 - rho * rho)

    def log_integrand(t):
        return -0.5 * t * t - _LOG_SQRT_2PI + log_ndtr((x2 - rho * t) / s)

    scale = efold_length(log_integrand, x1) if x1 < 0 else 1.0
    return math.exp(integrate_log_to_infinity(log_integrand, x1, -1, scale, **cfg.quad))


def copula_diagonal(p: CopulaParams, u: float, cfg: OracleConfig | None = None) -> float:
    return copula_cdf(p, u, u, cfg)


def lambda_L_u(p: CopulaParams, u: float, cfg: OracleConfig | None = None) -> float:
    """``C(u, u) / u``, the finite-``u`` lower-tail dependence ratio."""
    if not 0.0 < u < 0.5:
        raise DomainError("lambda_L(u) needs 0 < u < 1/2")
    return copula_diagonal(p, u, cfg) / u


@dataclass(frozen=True)
class CopulaRow:
    u: float
    lambda_u: float = math.nan
    lambda_asym: float = math.nan
    lambda_L: float = math.nan
    ratio1: float = math.nan
    ratio2: float = math.nan
    error: str = ""


@dataclass
class CopulaReport:
    params: CopulaParams
    rows: list[CopulaRow] = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def failed(self) -> int:
        return sum(1 for r in self.rows if r.error)


def _row(p: CopulaParams, u: float, cfg: OracleConfig | None) -> CopulaRow:
    try:
        lam = lambda_u(p, u, cfg)
        asym = lambda_asymptotic(p, u)
        lam_l = lambda_L_u(p, u, cfg)
    except TailquantError as exc:
        return CopulaRow(u, error=f"{type(exc).__name__}: {exc}")
    return CopulaRow(u, lam, asym, lam_l, lam / asym, lam_l * (p.theta + 1.0) / lam)


def copula_report(p: CopulaParams, u_grid, cfg: OracleConfig | None = None, workers: int = 1) -> CopulaReport:
    """Tabulate ``lambda``, its asymptotic law and ``lambda_L`` down a decreasing grid.

    ``ratio1 = lambda / (u**theta L)`` and ``ratio2 = lambda_L (theta + 1) / lambda``
    both tend to 1, slowly, as ``u -> 0``.
    """
    grid = sorted((float(u) for u in u_grid), reverse=True)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda u: _row(p, u, cfg), grid))
    else:
        rows = [_row(p, u, cfg) for u in grid]
    return CopulaReport(p, rows)
