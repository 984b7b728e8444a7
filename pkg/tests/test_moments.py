import io
import math

import numpy as np
import pytest

from ghostfock import fock
from ghostfock.errors import DegenerateState, TruncationOverflow
from ghostfock.moments import (MOMENT_ORDERS, MomentSet, analytic_moments, compare_moments, numeric_moments,
                               operated_tmss, write_moments_csv)

S_GRID = [0.01, 0.05, 0.09, 0.2, 0.35, 0.5, 0.75]
R_GRID = [0.0, 0.01, 0.1, 0.5, 0.9, 1.0]


def series_moments(s, r, kmax=3000):
    """Moments of (t a + r a^dag)|TMSS> by summing the two-term recursion directly.

    t a|k,k> = t sqrt(k)|k-1,k>, r a^dag|k,k> = r sqrt(k+1)|k+1,k>; the two images
    never overlap, so P(n_s, n_i) is a sum of two weighted geometric series.
    """
    x = math.tanh(s) ** 2
    k = np.arange(kmax, dtype=float)
    w = x ** k
    t2 = 1 - r * r
    ws, wa = t2 * k * w, r * r * (k + 1) * w
    z = ws.sum() + wa.sum()
    out = {}
    for name, (p, q) in MOMENT_ORDERS.items():
        out[name] = (np.sum(ws * (k - 1) ** p * k ** q) + np.sum(wa * (k + 1) ** p * k ** q)) / z
    return out


class TestClosedFormsAtSubtraction:
    def test_mean_signal(self):
        s = 0.35
        x = math.tanh(s) ** 2
        assert series_moments(s, 0.0)["m10"] == pytest.approx(2 * x / (1 - x), rel=1e-13)
        assert 2 * x / (1 - x) == pytest.approx(2 * math.sinh(s) ** 2, rel=1e-13)
        m = analytic_moments(s, 0.0)
        assert m.m10 == pytest.approx(2 * math.sinh(s) ** 2, rel=1e-12)
        assert m.m10 == pytest.approx(0.25517, abs=1e-5)

    def test_mean_idler(self):
        s = 0.35
        x = math.tanh(s) ** 2
        assert series_moments(s, 0.0)["m01"] == pytest.approx((1 + x) / (1 - x), rel=1e-13)
        assert analytic_moments(s, 0.0).m01 == pytest.approx(math.cosh(2 * s), rel=1e-12)
        assert analytic_moments(s, 0.0).m01 == pytest.approx(1.25517, abs=1e-5)

    @pytest.mark.parametrize("r", [0.0, 0.5, 1.0])
    def test_cross_moment_is_r_independent(self, r):
        s = 0.35
        x = math.tanh(s) ** 2
        closed = math.sinh(s) ** 2 * (3 * math.cosh(2 * s) + 1)
        if r in (0.0, 1.0):
            assert series_moments(s, r)["m11"] == pytest.approx(2 * x * (2 + x) / (1 - x) ** 2, rel=1e-12)
        assert series_moments(s, r)["m11"] == pytest.approx(closed, rel=1e-12)
        assert analytic_moments(s, r).m11 == pytest.approx(closed, rel=1e-14)
        assert closed == pytest.approx(0.6080048, abs=1e-7)


class TestOracleEquivalence:
    @pytest.mark.parametrize("s", S_GRID)
    @pytest.mark.parametrize("r", R_GRID)
    def test_analytic_vs_fock(self, s, r):
        comp = compare_moments(s, r)
        assert comp.max_rel_dev < 1e-8, comp.flagged

    @pytest.mark.parametrize("s,r", [(0.05, 0.3), (0.35, 0.5), (0.75, 1.0)])
    def test_series_vs_fock(self, s, r):
        ser = series_moments(s, r)
        num = numeric_moments(operated_tmss(s, r, cutoff=60)).as_dict()
        for key in MOMENT_ORDERS:
            assert num[key] == pytest.approx(ser[key], rel=1e-12)

    def test_numeric_matches_analytic_example(self):
        ana = analytic_moments(0.35, 0.5).as_array()
        num = numeric_moments(operated_tmss(0.35, 0.5)).as_array()
        np.testing.assert_allclose(num, ana, rtol=1e-9)

    def test_compare_examples(self):
        assert compare_moments(0.01, 0.01).max_rel_dev < 1e-8
        assert compare_moments(0.75, 1.0, cutoff=40).max_rel_dev < 1e-8
        assert compare_moments(0.35, 0.0).abs_dev["m10"] < 1e-12

    def test_m11_r_independence_on_grid(self):
        for s in S_GRID:
            vals = [numeric_moments(operated_tmss(s, r)).m11 for r in R_GRID]
            assert max(vals) - min(vals) <= 1e-9 * max(vals)

    def test_comparison_flags_bad_entries(self):
        comp = compare_moments(0.35, 0.5, cutoff=14)
        assert not comp.ok
        assert comp.flagged == ["m22"]

    def test_too_small_cutoff_overflows(self):
        with pytest.raises(TruncationOverflow):
            compare_moments(0.35, 0.5, cutoff=6)


class TestSimpleStates:
    def test_vacuum(self):
        assert np.all(numeric_moments(fock.vacuum(2, 4)).as_array() == 0)

    def test_one_one(self):
        assert np.all(numeric_moments(fock.fock_state((1, 1), 4)).as_array() == 1)

    def test_addition_limit_small_s(self):
        m = analytic_moments(1e-6, 1.0)
        assert m.m10 == pytest.approx(1, abs=1e-10)
        assert m.m20 == pytest.approx(1, abs=1e-10)
        for key in ("m01", "m02", "m11", "m21", "m12", "m22"):
            assert abs(getattr(m, key)) < 1e-10


class TestMomentSet:
    @pytest.mark.parametrize("s", S_GRID)
    @pytest.mark.parametrize("r", R_GRID)
    def test_variance_bounds(self, s, r):
        analytic_moments(s, r).check()
        numeric_moments(operated_tmss(s, r)).check()

    def test_vectorized(self):
        s = np.array([0.1, 0.2])[:, None]
        r = np.array([0.0, 0.5, 1.0])[None, :]
        m = analytic_moments(s, r)
        assert m.m22.shape == (2, 3)
        assert m.m22[1, 2] == pytest.approx(analytic_moments(0.2, 1.0).m22, rel=1e-15)

    def test_degenerate(self):
        with pytest.raises(DegenerateState):
            analytic_moments(0.0, 0.0)

    def test_csv(self):
        buf = io.StringIO()
        m = analytic_moments(0.2, 0.3)
        write_moments_csv(buf, [(0.2, 0.3, m, "analytic")])
        header, row = buf.getvalue().splitlines()
        assert header == "s,r,m10,m01,m20,m02,m11,m21,m12,m22,source"
        fields = row.split(",")
        assert float(fields[2]) == m.m10
        assert fields[-1] == "analytic"
