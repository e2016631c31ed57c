import math

import numpy as np
import pytest

from tailquant.errors import DomainError, InvalidParams
from tailquant.gg_tail import (
    FULL,
    LEADING,
    ApproxMethod,
    GGTailParams,
    Tail,
    approximant_log,
    expansion_log,
    gg_lower_approx,
    gg_lower_expansion,
    gg_upper_approx,
    gg_upper_expansion,
    leading_term,
    max_expansion_terms,
    model_log_tail,
    order_prediction,
    predicted_order,
    predicted_order_leading,
)

NORMAL = GGTailParams(1 / math.sqrt(2 * math.pi), -1.0, 0.5, 2.0, 2.0, Tail.LOWER)
NORMAL_UP = GGTailParams(1 / math.sqrt(2 * math.pi), -1.0, 0.5, 2.0, 2.0, Tail.UPPER)
GAMMA2_UP = GGTailParams(1.0, 1.0, 1.0, 1.0, 1.0, Tail.UPPER)
EXP_LOW = GGTailParams(1.0, 0.0, 1.0, 1.0, 1.0, Tail.LOWER)
EXP_UP = GGTailParams(1.0, 0.0, 1.0, 1.0, 1.0, Tail.UPPER)
SKEWSLASH = GGTailParams(0.5, -2.0, 2.0, 1.0, 1.0, Tail.LOWER)
SN_POS = GGTailParams(1 / (2 * math.pi), -2.0, 1.0, 2.0, 2.0, Tail.LOWER)


def normal_closed_form(u):
    return -np.sqrt(-2.0 * np.log(u * np.sqrt(4 * np.pi * np.abs(np.log(u)))))


class TestParams:
    @pytest.mark.parametrize("field", ["a", "c", "d", "e"])
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
    def test_rejects_nonpositive(self, field, bad):
        kw = dict(a=1.0, b=-1.0, c=1.0, d=1.0, e=1.0, side=Tail.LOWER)
        kw[field] = bad
        with pytest.raises(InvalidParams):
            GGTailParams(**kw)

    def test_degenerate_b(self):
        assert EXP_LOW.degenerate_b
        assert not NORMAL.degenerate_b

    def test_side_mismatch(self):
        with pytest.raises(InvalidParams):
            gg_upper_approx(NORMAL, 0.99)
        with pytest.raises(InvalidParams):
            gg_lower_approx(NORMAL_UP, 0.01)


class TestMethodParsing:
    @pytest.mark.parametrize("text, expected", [
        ("leading", LEADING),
        ("full", FULL),
        ("expansion3", ApproxMethod.expansion(3)),
        ("Voutier", ApproxMethod.baseline("voutier")),
    ])
    def test_parse(self, text, expected):
        assert ApproxMethod.parse(text) == expected

    @pytest.mark.parametrize("text", ["expansion0", "expansion5", "expansionx", ""])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            ApproxMethod.parse(text)

    def test_round_trip_names(self):
        for name in ["leading", "full", "expansion1", "expansion4", "voutier"]:
            assert str(ApproxMethod.parse(name)) == name


class TestApproximant:
    def test_normal_example(self):
        assert gg_lower_approx(NORMAL, 0.01) == pytest.approx(-2.2698318217874625, rel=1e-15)
        assert gg_lower_approx(NORMAL, 0.01) == pytest.approx(-2.2699, abs=1e-4)

    def test_exponential_b0_branch(self):
        assert gg_lower_approx(EXP_LOW, math.exp(-5.0)) == pytest.approx(-5.0, rel=1e-15)

    def test_exponential_upper(self):
        assert gg_upper_approx(EXP_UP, 0.95) == pytest.approx(-math.log(0.05), rel=1e-14)
        assert round(gg_upper_approx(EXP_UP, 0.95), 6) == 2.995732

    def test_skewslash_closed_form(self):
        # 40-digit evaluation of the same closed form
        assert gg_lower_approx(SKEWSLASH, 1e-6) == pytest.approx(-4.6285369547860989061, rel=1e-14)

    def test_gamma_simplified_form(self):
        v = 1 - 0.999
        simplified = -math.log(v * math.gamma(2.0) / abs(math.log(v)))
        assert gg_upper_approx(GAMMA2_UP, 0.999) == pytest.approx(simplified, rel=1e-12)
        assert gg_upper_approx(GAMMA2_UP, 0.999) == pytest.approx(8.8404000128982025433, rel=1e-12)

    def test_reduces_to_normal_closed_form(self):
        u = np.geomspace(1e-2, 1e-300, 1000)
        y = gg_lower_approx(NORMAL, u)
        np.testing.assert_allclose(y, normal_closed_form(u), rtol=1e-14, atol=0)

    def test_normal_symmetry(self):
        u = 1 - np.geomspace(1e-2, 1e-15, 50)
        np.testing.assert_allclose(gg_upper_approx(NORMAL_UP, u), -gg_lower_approx(NORMAL, 1 - u), rtol=1e-14)

    @pytest.mark.parametrize("params", [NORMAL, SKEWSLASH, SN_POS, EXP_LOW])
    def test_monotone_on_fine_grid(self, params):
        u = np.geomspace(1e-300, 1e-2, 1000)
        y = gg_lower_approx(params, u)
        assert np.all(np.diff(y) >= 0)
        assert np.all(y < 0)

    def test_upper_monotone(self):
        u = 1 - np.geomspace(1e-2, 1e-15, 1000)
        y = gg_upper_approx(GAMMA2_UP, u)
        assert np.all(np.diff(y) >= 0)

    @pytest.mark.parametrize("u", [0.5, 1 / math.e, 0.9])
    def test_guard(self, u):
        with pytest.raises(DomainError):
            gg_lower_approx(NORMAL, u)

    def test_nonpositive_bracket(self):
        # a tiny amplitude pushes the bracket negative just inside the guard
        p = GGTailParams(1e-6, -1.0, 0.5, 2.0, 2.0, Tail.LOWER)
        with pytest.raises(DomainError):
            gg_lower_approx(p, 0.3)

    def test_deep_tail_log_space(self):
        # u = exp(-1e6) is far below binary64 but fine as a log
        y = approximant_log(NORMAL, -1e6)
        assert y == pytest.approx(-math.sqrt(2e6), rel=1e-4)

    @pytest.mark.parametrize("params", [
        NORMAL, SN_POS, SKEWSLASH,
        GGTailParams(0.3674, 1.0, 2.56, 1.0, 1.0, Tail.LOWER),
        GGTailParams(2.0, -3.0, 0.7, 1.5, 1.0, Tail.LOWER),
    ])
    def test_forward_composition(self, params):
        xs = -np.geomspace(5, 50, 200)
        y = np.array([approximant_log(params, model_log_tail(params, x)) for x in xs])
        scaled = np.abs(y / xs - 1) * np.abs(xs) ** (2 * params.d) / np.log(np.abs(xs))
        assert scaled.max() < 10.0

    def test_b0_round_trip(self):
        p = GGTailParams(3.0, 0.0, 0.8, 1.7, 1.0, Tail.LOWER)
        xs = -np.geomspace(2, 200, 100)
        y = np.array([approximant_log(p, model_log_tail(p, x)) for x in xs])
        np.testing.assert_allclose(y, xs, rtol=1e-13)


class TestExpansion:
    def test_normal_k4(self):
        u = 1e-8
        r = math.sqrt(-2 * math.log(u))
        ll = math.log(abs(math.log(u)))
        expected = -r + ll / (2 * r) + math.log(4 * math.pi) / (2 * r) + ll ** 2 / (8 * r ** 3)
        assert gg_lower_expansion(NORMAL, u, 4) == pytest.approx(expected, rel=1e-14)
        assert gg_lower_expansion(NORMAL, u, 4) == pytest.approx(-5.6164660951447102837, rel=1e-14)

    def test_skewnormal_k3(self):
        assert gg_lower_expansion(SN_POS, 1e-6, 3) == pytest.approx(-3.1164698852913140496, rel=1e-14)

    def test_gamma_k3(self):
        u = 0.9999
        v = 1 - u
        expected = -math.log(v) + math.log(abs(math.log(v))) - math.lgamma(2.0)
        assert gg_upper_expansion(GAMMA2_UP, u, 3) == pytest.approx(expected, rel=1e-14)

    def test_exponential_k1(self):
        u = np.array([0.9, 0.99, 0.999999])
        np.testing.assert_allclose(gg_upper_expansion(EXP_UP, u, 1), -np.log1p(-u), rtol=1e-14)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_normal_symmetry(self, k):
        u = 1 - np.geomspace(1e-2, 1e-12, 11)
        np.testing.assert_allclose(gg_upper_expansion(NORMAL_UP, u, k),
                                   -gg_lower_expansion(NORMAL, 1 - u, k), rtol=1e-14)

    def test_depth_limit(self):
        p = GGTailParams(1.0, -1.0, 1.0, 2.0, 1.0, Tail.LOWER)
        assert max_expansion_terms(p) == 3
        assert max_expansion_terms(NORMAL) == 4
        with pytest.raises(InvalidParams):
            gg_lower_expansion(p, 1e-5, 4)

    def test_k1_equals_leading(self):
        u = np.geomspace(1e-2, 1e-100, 30)
        np.testing.assert_allclose(gg_lower_expansion(NORMAL, u, 1), leading_term(NORMAL, u), rtol=1e-15)

    def test_consistency_with_full(self):
        # the gap to the full approximant vanishes for k = max and shrinks with k
        log_v = -np.geomspace(10, 1e8, 8)
        gaps = {k: np.abs(np.array([expansion_log(NORMAL, lv, k) - approximant_log(NORMAL, lv) for lv in log_v]))
                for k in range(1, 5)}
        assert np.all(np.diff(gaps[4]) < 0)
        assert gaps[4][-1] < 1e-6
        for k in range(2, 5):
            ratios = gaps[k] / gaps[k - 1]
            assert ratios[-1] < ratios[0]

    def test_guard(self):
        with pytest.raises(DomainError):
            gg_lower_expansion(NORMAL, 0.5, 2)


class TestLeadingTerm:
    def test_examples(self):
        assert leading_term(NORMAL, math.exp(-2.0)) == pytest.approx(-2.0, rel=1e-15)
        assert leading_term(NORMAL, 0.01) == pytest.approx(-math.sqrt(-2 * math.log(0.01)), rel=1e-15)
        assert round(leading_term(NORMAL, 0.01), 5) == -3.03485

    def test_gamma_upper(self):
        assert leading_term(GAMMA2_UP, 1 - math.exp(-7.0)) == pytest.approx(7.0, rel=1e-9)


class TestPredictedOrder:
    def test_loglog_class(self):
        L = -math.log(1e-10)
        assert predicted_order(NORMAL, 1e-10) == pytest.approx(math.log(L) / L ** 2, rel=1e-14)
        assert round(predicted_order(NORMAL, 1e-10), 6) == 0.005916
        assert order_prediction(NORMAL).kind == "loglog_over_logsq"

    def test_power_class(self):
        p = GGTailParams(1.0, -1.0, 1.0, 6.0, 2.0, Tail.LOWER)
        pred = order_prediction(p)
        assert pred.kind == "power_of_inverse_log"
        assert pred.power == pytest.approx(2.0 / 6.0 + 1.0)
        assert predicted_order(p, 1e-10) == pytest.approx(23.025850929940457 ** (-4.0 / 3.0), rel=1e-14)

    def test_d_equal_or_below_e_is_loglog(self):
        # d <= e stays in the log-log class even when e is much larger than d
        p = GGTailParams(1.0, -1.0, 1.0, 2.0, 6.0, Tail.LOWER)
        assert order_prediction(p).kind == "loglog_over_logsq"

    def test_power_value(self):
        from tailquant.gg_tail import OrderPrediction
        pred = OrderPrediction("power_of_inverse_log", 4.0, Tail.LOWER)
        assert f"{pred.value_at(1e-10):.3g}" == "3.56e-06"

    def test_leading_order(self):
        L = -math.log(1e-10)
        assert predicted_order_leading(NORMAL, 1e-10) == pytest.approx(math.log(L) / L, rel=1e-14)
        assert round(predicted_order_leading(NORMAL, 1e-10), 4) == 0.1362

    def test_decreasing_and_vanishing(self):
        u = np.geomspace(1e-2, 1e-300, 200)
        for params in (NORMAL, SKEWSLASH, GGTailParams(1.0, -1.0, 1.0, 2.0, 6.0, Tail.LOWER)):
            p = predicted_order(params, u)
            assert np.all(p > 0) and np.all(np.diff(p) < 0)
            assert p[-1] < 1e-3 * p[0]
            assert np.all(predicted_order_leading(params, u[u < 1e-3]) >= predicted_order(params, u[u < 1e-3]))

    def test_upper_uses_complement(self):
        assert predicted_order(NORMAL_UP, 1 - 1e-6) == pytest.approx(predicted_order(NORMAL, 1e-6), rel=1e-9)

    def test_guard(self):
        with pytest.raises(DomainError):
            predicted_order(NORMAL, 0.5)
