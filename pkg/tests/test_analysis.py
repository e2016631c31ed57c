import math

import numpy as np
import pytest

from tailquant.analysis import (
    VOUTIER,
    ErrorCurve,
    ErrorRow,
    build_error_curve,
    compare,
    decade_grid,
    default_grid,
    expansion_ladder,
    fit_order,
)
from tailquant.distributions import Gamma, Normal, SkewNormal, SkewSlash, VarianceGamma
from tailquant.errors import InsufficientData, RangeError, TooManyFailures
from tailquant.gg_tail import FULL, LEADING, ApproxMethod, Tail

VOUT = ApproxMethod.baseline("voutier")


def synthetic(rel, pred):
    rows = [ErrorRow(u=float(p), tail_mass=float(p), h_ref=-1.0, y_approx=-1.0, rel_err=float(r), pred=float(p),
                     ratio=float(r / p)) for r, p in zip(rel, pred)]
    return ErrorCurve(Normal(), Tail.LOWER, FULL, rows)


class TestGrids:
    def test_default(self):
        g = default_grid()
        assert len(g) == 41
        assert g[0] == pytest.approx(1e-2) and g[-1] == pytest.approx(1e-12)

    def test_extended(self):
        assert default_grid(extended=True)[-1] == pytest.approx(1e-100)

    def test_decades(self):
        np.testing.assert_allclose(decade_grid(1e-3, 1e-12), 10.0 ** -np.arange(3, 13))


class TestErrorCurve:
    def test_normal_full(self):
        curve = build_error_curve(Normal(), Tail.LOWER, FULL, decade_grid(1e-3, 1e-12))
        assert len(curve.rows) == 10
        us = curve.column("u")
        assert np.all(np.diff(us) < 0)
        ratio = curve.column("ratio")
        assert ratio.max() / ratio.min() < 10
        assert np.all(curve.column("rel_err") >= 0) and np.all(curve.column("pred") > 0)

    def test_leading_worse_than_full(self):
        grid = decade_grid(1e-3, 1e-12)
        full = build_error_curve(Normal(), Tail.LOWER, FULL, grid).column("rel_err")
        lead = build_error_curve(Normal(), Tail.LOWER, LEADING, grid).column("rel_err")
        assert np.all(lead > full)

    def test_upper_rows_carry_u(self):
        curve = build_error_curve(Gamma(2.0), Tail.UPPER, FULL, [1e-3, 1e-6])
        assert curve.rows[0].u == pytest.approx(0.999)
        assert curve.rows[1].h_ref > curve.rows[0].h_ref > 0

    def test_failed_rows_kept(self):
        # 0.5 is outside the approximant's domain; 1 of 6 rows is below the 20% limit
        curve = build_error_curve(Normal(), Tail.LOWER, FULL, [0.5, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
        assert curve.failed == 1
        assert curve.rows[0].error.startswith("DomainError")
        assert math.isfinite(curve.rows[0].h_ref)

    def test_too_many_failures(self):
        with pytest.raises(TooManyFailures) as info:
            build_error_curve(Normal(), Tail.LOWER, FULL, [0.5, 0.45, 1e-3])
        assert not info.value.oracle_caused

    def test_voutier_outside_range_is_row_error(self):
        curve = build_error_curve(Normal(), Tail.LOWER, VOUT, [0.05] + list(decade_grid(1e-2, 1e-10)))
        assert curve.rows[0].error.startswith("RangeError")
        assert curve.failed == 1

    def test_compare_shares_reference(self):
        curves = compare(Normal(), Tail.LOWER, [LEADING, FULL, ApproxMethod.expansion(4), VOUT],
                         decade_grid(1e-3, 1e-6))
        assert list(curves) == ["leading", "full", "expansion4", "voutier"]
        h = {name: tuple(c.column("h_ref")) for name, c in curves.items()}
        assert len(set(h.values())) == 1

    def test_threads_do_not_change_output(self):
        grid = default_grid(points=12)
        a = build_error_curve(SkewNormal(1.0), Tail.LOWER, FULL, grid, workers=1)
        b = build_error_curve(SkewNormal(1.0), Tail.LOWER, FULL, grid, workers=4)
        assert a.rows == b.rows

    def test_oracle_limited_flag(self):
        # the b = 0 exponential tail is inverted exactly, so its error is pure oracle noise
        curve = build_error_curve(Gamma(1.0), Tail.UPPER, FULL, decade_grid(1e-2, 1e-8))
        assert all(r.oracle_limited for r in curve.rows)
        with pytest.raises(InsufficientData):
            fit_order(curve)


class TestFitOrder:
    def test_proportional(self):
        pred = np.geomspace(1e-1, 1e-5, 9)
        fit = fit_order(synthetic(0.3 * pred, pred))
        assert fit.slope == pytest.approx(1.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(0.3), abs=1e-12)

    def test_constant_error(self):
        pred = np.geomspace(1e-1, 1e-5, 9)
        fit = fit_order(synthetic(np.full(9, 1e-3), pred))
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_insufficient(self):
        pred = np.geomspace(1e-1, 1e-2, 4)
        with pytest.raises(InsufficientData):
            fit_order(synthetic(pred, pred))

    def test_normal_full_slope(self):
        fit = fit_order(build_error_curve(Normal(), Tail.LOWER, FULL, default_grid()))
        assert 0.7 <= fit.slope <= 1.3
        assert fit.r_squared >= 0.9


class TestLadder:
    def test_normal_four_columns(self):
        cols = expansion_ladder(Normal(), Tail.LOWER, decade_grid(1e-4, 1e-12))
        assert [c.k for c in cols] == [1, 2, 3, 4]
        assert all(math.isfinite(c.max_ratio) and c.max_ratio < 100 for c in cols)

    def test_gamma_three_columns(self):
        cols = expansion_ladder(Gamma(2.0), Tail.UPPER, default_grid())
        assert [c.k for c in cols] == [1, 2, 3]
        assert all(c.max_ratio < 100 for c in cols)

    def test_skewslash_first_column(self):
        cols = expansion_ladder(SkewSlash(1.0, 1.0), Tail.LOWER, default_grid())
        assert cols[0].max_ratio < 100


class TestVoutier:
    def test_constants_verbatim(self):
        assert VOUTIER.c3 == -1.000182518730158122
        assert VOUTIER.c0p == 16.682320830719986527
        assert VOUTIER.c1p == 4.120411523939115059
        assert VOUTIER.c2p == 0.029814187308200211
        assert VOUTIER.d0 == 7.173787663925508066
        assert VOUTIER.d1 == 8.759693508958633869

    @pytest.mark.parametrize("u", [0.05, 0.5, 1e-300])
    def test_range(self, u):
        with pytest.raises(RangeError):
            VOUTIER(u)

    def test_close_to_oracle(self):
        # minimax rational fit: agreement to a few parts in 1e5
        curve = build_error_curve(Normal(), Tail.LOWER, VOUT, default_grid())
        assert np.all(curve.column("rel_err") < 2e-5)

    def test_upper_mirror(self):
        curve = build_error_curve(Normal(), Tail.UPPER, VOUT, [1e-3])
        assert curve.rows[0].y_approx == pytest.approx(-VOUTIER(1e-3), rel=1e-15)

    def test_other_distribution_rejected(self):
        with pytest.raises(TooManyFailures):
            build_error_curve(VarianceGamma(0.5, 0.5), Tail.LOWER, VOUT, [1e-3, 1e-4])


class TestOrdering:
    # leading > full > deepest expansion pointwise for u <= 1e-4
    @pytest.mark.parametrize("dist", [Normal(), SkewNormal(1.0), SkewNormal(-1.0), VarianceGamma(0.5, 0.5)],
                             ids=lambda d: d.label())
    def test_pointwise(self, dist):
        grid = default_grid()[default_grid() <= 1e-4 * (1 + 1e-12)]
        params = dist.tail_params("lower")
        from tailquant.gg_tail import max_expansion_terms
        deepest = ApproxMethod.expansion(max_expansion_terms(params))
        curves = compare(dist, Tail.LOWER, [LEADING, FULL, deepest], grid)
        lead, full, exp = (curves[k].column("rel_err") for k in ("leading", "full", str(deepest)))
        assert np.all(lead > full)
        assert np.all(full > exp)
