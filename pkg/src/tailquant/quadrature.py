"""Adaptive Gauss-Kronrod quadrature of log-integrands.

Tail probabilities span hundreds of orders of magnitude, so integrands are
supplied as ``log f`` and the engine returns ``log of the integral of f``.
Internally every panel is evaluated with ``exp(log f - shift)``, where
``shift`` tracks the largest log value seen so far.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import QuadratureFailure

__all__ = ["integrate_log", "integrate_log_to_infinity", "GK15_NODES", "GK15_WEIGHTS", "G7_WEIGHTS"]

# QUADPACK qk15 abscissae and weights
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK15_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK15_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss points are the odd-indexed Kronrod abscissae
G7_WEIGHTS = np.zeros(15)
G7_WEIGHTS[[1, 3, 5]] = _WG[:3]
G7_WEIGHTS[7] = _WG[3]
G7_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


def _panel_logs(logf, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * GK15_NODES[None, :]
    vals = np.asarray(logf(t), dtype=float)
    if vals.shape != t.shape:
        vals = np.broadcast_to(vals, t.shape)
    if np.any(np.isnan(vals)) or np.any(vals == np.inf):
        raise QuadratureFailure("integrand produced nan or +inf")
    return half, vals


def _panel_sums(half, vals, shift):
    f = np.exp(vals - shift)
    kron = half * (f @ GK15_WEIGHTS)
    gauss = half * (f @ G7_WEIGHTS)
    # QUADPACK error heuristic
    mean = (f @ GK15_WEIGHTS) / 2.0
    resasc = half * (np.abs(f - mean[:, None]) @ GK15_WEIGHTS)
    resabs = half * (np.abs(f) @ GK15_WEIGHTS)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    return kron, err


def integrate_log(logf, a: float, b: float, *, rel_tol: float = 1e-12, abs_tol: float = 1e-14,
                  max_panels: int = 4000, initial_panels: int = 8) -> float:
    """Return ``log(integral_a^b exp(logf(t)) dt)``.

    ``logf`` must accept a 2-D array of abscissae and return log values of the
    same shape (``-inf`` is allowed). ``abs_tol`` is measured relative to
    ``exp(max log f)``, so it is scale-free. Raises ``QuadratureFailure`` when
    the panel budget is exhausted.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("finite limits required; use integrate_log_to_infinity")
    if a == b:
        return -math.inf
    if a > b:
        raise ValueError("need a < b")
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    half, vals = _panel_logs(logf, lo, hi)
    shift = float(np.max(vals))
    if shift == -math.inf:
        return -math.inf
    kron, err = _panel_sums(half, vals, shift)

    while True:
        total = math.fsum(kron)
        tol = max(abs_tol, rel_tol * abs(total))
        err_sum = float(np.sum(err))
        if err_sum <= tol:
            break
        if lo.size >= max_panels:
            raise QuadratureFailure(
                f"quadrature did not converge: error {err_sum:.3e} > tol {tol:.3e} with {lo.size} panels")
        width = hi - lo
        share = tol * width / (b - a)
        split = err > share
        if not np.any(split):
            split = err == err.max()
        mids = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mids])
        new_hi = np.concatenate([mids, hi[split]])
        new_half, new_vals = _panel_logs(logf, new_lo, new_hi)
        peak = float(np.max(new_vals))
        if peak > shift + 50.0:
            scale = math.exp(shift - peak)
            kron = kron * scale
            err = err * scale
            shift = peak
        new_kron, new_err = _panel_sums(new_half, new_vals, shift)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kron = np.concatenate([kron[keep], new_kron])
        err = np.concatenate([err[keep], new_err])

    total = math.fsum(kron)
    if total <= 0:
        return -math.inf
    return shift + math.log(total)


def integrate_log_to_infinity(logf, x0: float, direction: int, scale: float = 1.0, **kwargs) -> float:
    """``log`` of the integral of ``exp(logf)`` from ``x0`` towards ``direction * inf``.

    Uses ``t = x0 + direction * scale * s / (1 - s)`` on ``s in [0, 1)``;
    ``scale`` should be the local e-folding length of the integrand at ``x0``.
    """
    if direction not in (-1, 1):
        raise ValueError("direction must be -1 or +1")
    log_scale = math.log(scale)

    def mapped(s):
        one_minus = 1.0 - s
        t = x0 + direction * scale * s / one_minus
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = logf(t) + log_scale - 2.0 * np.log(one_minus)
        return np.where(np.isfinite(t), out, -np.inf)

    return integrate_log(mapped, 0.0, 1.0, **kwargs)
