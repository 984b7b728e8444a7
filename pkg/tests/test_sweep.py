import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghostfock.errors import BadParams, NoTransition
from ghostfock.snr import SnrModelVariant
from ghostfock.sweep import (BOUNDARY_TIE, default_s_values, figure_data, locate_bifurcation, optimize_r,
                             optimum_branch, r_star_jump, snr_at, snr_grid)

S_CRIT = locate_bifurcation()


class TestOptimize:
    def test_interior_at_weak_squeezing(self):
        rec = optimize_r(0.01)
        assert rec.boundary_flag == "interior"
        assert 0.005 <= rec.r_star <= 0.02
        assert rec.snr_star > max(rec.snr_r0, rec.snr_r1)

    def test_boundary_at_strong_squeezing(self):
        rec = optimize_r(0.35)
        assert rec.boundary_flag in ("r0", "r1")
        assert rec.snr_star == max(rec.snr_r0, rec.snr_r1)

    @pytest.mark.parametrize("s", [0.01, 0.09, 0.35, 0.75])
    def test_subtraction_and_addition_tie(self, s):
        rec = optimize_r(s)
        assert abs(rec.snr_r0 - rec.snr_r1) <= BOUNDARY_TIE

    def test_ties_go_to_r0(self):
        rec = optimize_r(0.5)
        assert rec.r_star == 0.0
        assert rec.co_optimal == (0.0, 1.0)

    @pytest.mark.parametrize("s", [0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75])
    def test_beats_dense_grid(self, s):
        rec = optimize_r(s)
        dense = snr_at(s, np.linspace(0, 1, 20001))
        assert rec.snr_star >= dense.max() - 1e-12

    def test_r_tracks_s_below_transition(self):
        for s in np.linspace(0.005, S_CRIT / 2, 12):
            rec = optimize_r(float(s))
            assert rec.boundary_flag == "interior"
            assert 0.5 <= rec.r_star / s <= 2.0

    def test_bad_inputs(self):
        with pytest.raises(BadParams):
            optimize_r(0.0)
        with pytest.raises(BadParams):
            optimize_r(0.1, tol=1e-13)

    @settings(max_examples=20, deadline=None)
    @given(s=st.floats(0.01, 0.75), frames=st.integers(2, 10**6))
    def test_argmax_independent_of_frames(self, s, frames):
        a = optimize_r(s)
        b = optimize_r(s, SnrModelVariant(frames=frames))
        assert a.boundary_flag == b.boundary_flag
        assert b.r_star == pytest.approx(a.r_star, abs=1e-6)


class TestBifurcation:
    def test_location(self):
        assert 0.2 < S_CRIT < 0.25
        assert optimize_r(S_CRIT - 1e-4).boundary_flag == "interior"
        assert optimize_r(S_CRIT + 1e-4).boundary_flag != "interior"

    def test_deterministic(self):
        assert locate_bifurcation() == S_CRIT

    def test_bracket_tolerance(self):
        coarse = locate_bifurcation(tol_s=1e-3)
        assert abs(coarse - S_CRIT) <= 1e-3

    def test_no_transition(self):
        with pytest.raises(NoTransition):
            locate_bifurcation((0.3, 0.5))

    def test_jump(self):
        jump = r_star_jump(S_CRIT)
        assert jump.below.boundary_flag == "interior"
        assert jump.to_tie_broken == pytest.approx(jump.below.r_star)
        assert jump.to_farthest_branch == pytest.approx(1 - jump.below.r_star)
        assert jump.to_farthest_branch >= 0.5

    def test_branch_finds_transition(self):
        branch = optimum_branch([0.05, 0.1, 0.2, 0.3, 0.4])
        assert branch.s_crit == pytest.approx(S_CRIT, abs=1e-6)
        assert [r.boundary_flag for r in branch.records][:3] == ["interior"] * 3


class TestGrid:
    def test_shape_and_values(self):
        grid = snr_grid([0.1, 0.2], [0.0, 0.5, 1.0])
        assert grid.snr.shape == (2, 3)
        assert grid.snr[1, 1] == float(snr_at(0.2, 0.5))

    def test_validation(self):
        with pytest.raises(BadParams):
            snr_grid([], [0.1])
        with pytest.raises(BadParams):
            snr_grid([0.1], [1.5])

    def test_csv(self):
        buf = io.StringIO()
        snr_grid([0.1], [0.0, 1.0]).write_csv(buf)
        assert buf.getvalue().splitlines()[0] == "s,r,snr"
        assert len(buf.getvalue().splitlines()) == 3

    def test_default_s_values(self):
        s = default_s_values()
        assert s[0] == pytest.approx(0.005) and s[-1] == pytest.approx(0.75)
        assert np.all(np.diff(s) > 0)


class TestFigures:
    def test_fig2a(self):
        table = figure_data("2a", r_values=[0.0, 0.5, 1.0])["fig2a"]
        assert table.columns == ("s", "r", "snr", "curve_tag")
        assert len(table.rows) == 12
        assert set(table.column("curve_tag")) == {"coherent", "add"}

    def test_fig2b(self):
        tables = figure_data("2b", s_values=[0.05, 0.35], r_values=[0.0, 1.0])
        assert len(tables["fig2b"].rows) == 4
        assert list(tables["ridge"].column("boundary_flag")) == ["interior", "r0"]

    def test_fig3_ordering(self):
        table = figure_data("3", s_values=[0.01, 0.1, 0.35])["fig3"]
        opt, tmss = table.column("snr_opt"), table.column("snr_tmss")
        sub, add = table.column("snr_sub"), table.column("snr_add")
        assert np.all(opt >= np.maximum(sub, add) - 1e-12)
        assert np.all(sub > tmss)
        np.testing.assert_allclose(sub, add, rtol=1e-9)

    def test_unknown(self):
        with pytest.raises(BadParams):
            figure_data("4")
