from fractions import Fraction as F

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwmhlab import distributions as D
from rwmhlab import extremal as E
from rwmhlab.errors import PreconditionFailed, RangeError


def _mp(x):
    return mp.mpf(x.numerator) / x.denominator if isinstance(x, F) else x


class TestPieces:
    def test_power_sum(self):
        assert E.power_sum(4, 2) == 30
        assert E.power_sum(3, 1) == 6
        assert float(E.power_sum(3, 0.5)) == pytest.approx(1 + 2**0.5 + 3**0.5)

    def test_ratios(self):
        assert E.g_ratio(2, 2) == F(9, 5)
        assert E.f_ratio(3, 1, 2) == F(9 * 2, 14)
        assert E.f_ratio(3, 2, 2) == E.g_ratio(3, 2)
        with pytest.raises(RangeError):
            E.f_ratio(3, 3, 2)

    def test_envelope_example(self):
        assert E.f1_envelope(6, F(11, 10)) < 1.058

    @pytest.mark.parametrize("r", [F(11, 10), 2, F(7, 2), 6])
    def test_envelope_bounds_f(self, r):
        for k in range(1, 15):
            env = E.f1_envelope(k, r)
            assert all(E.f_ratio(k, y, r) <= env for y in range(k))

    @pytest.mark.parametrize("r", [F(11, 10), 2, F(7, 2)])
    def test_real_maximizer(self, r):
        for k in range(2, 12):
            ystar = E.real_maximizer(k, r)
            best = max(range(k), key=lambda y: E.f_ratio(k, y, r))
            assert abs(best - ystar) <= 1


class TestSOfR:
    def test_unit_branch(self):
        assert E.s_of_r(F(7, 10)).s_value == 1
        assert E.s_of_r(1).branch == "unit"

    def test_small_example(self):
        res = E.s_of_r(F(204, 100))
        assert res.thresholds.K == 3 and res.argmax_k == 2
        assert res.s_value == pytest.approx(float(E.g_ratio(2, F(204, 100))), rel=1e-14)

    def test_exact_at_integer(self):
        assert E.s_of_r(2).s_value == F(9, 5)

    @pytest.mark.parametrize("r", ["1.05", "1.2", 2, "3.5", 6, 10])
    def test_auto_matches_brute(self, r):
        a, b = E.s_of_r(r), E.s_of_r(r, "brute")
        assert mp.almosteq(mp.mpf(float(a.s_value)), mp.mpf(float(b.s_value)), rel_eps=1e-13)
        assert (a.argmax_k, a.argmax_y) == (b.argmax_k, b.argmax_y)

    def test_small_gap_branch(self):
        res = E.s_of_r(F(102, 100))
        assert res.branch == "small-gap"
        brute = E.brute_force_s(F(102, 100), res.thresholds.k1 + 5)
        assert mp.almosteq(res.s_value, brute, rel_eps=1e-30)

    def test_maximizer_within_k0(self):
        for r in ("1.5", 3, "7.25", 12):
            res = E.s_of_r(r)
            assert res.argmax_k <= res.thresholds.k0

    @pytest.mark.parametrize("r", [50, 100, 200, 400])
    def test_asymptotic_schedule(self, r):
        assert abs(E.asymptotic_ratio(r) - 1) <= 5 / r

    def test_monotone(self):
        grid = [F(1043, 1000)] + [F(int(v * 100), 100) for v in np.linspace(1.1, 20, 60)]
        vals = [_mp(E.s_of_r(r).s_value) for r in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize("r", [F(3, 2), 2, 3, F(13, 2), 15])
    def test_sandwich(self, r):
        lo, hi = E.sandwich(r)
        assert lo <= _mp(E.s_of_r(r).s_value) <= hi

    def test_bad_inputs(self):
        with pytest.raises(RangeError):
            E.s_of_r(0)
        with pytest.raises(RangeError):
            E.s_of_r(2, "fast")


class TestUnimodality:
    @pytest.mark.parametrize("r, mode", [(2, 2), ("8.5", 8), ("80.1", 74)])
    def test_mode(self, r, mode):
        rep = E.unimodality_check(r, 120)
        assert rep.ok and rep.sign_changes == 1 and rep.mode_k == mode == rep.K

    def test_range(self):
        with pytest.raises(RangeError):
            E.unimodality_check(F(102, 100), 20)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0, 50), st.floats(0, 50), st.floats(1, 30))
    def test_lemma_h_nonnegative(self, t, a, r):
        assert E.lemma_h_margin(t, a, r) >= -1e-12 * E.lemma_h_scale(t, a, r)

    def test_lemma_h_range(self):
        with pytest.raises(RangeError):
            E.lemma_h_margin(1, 1, 0.5)


class TestHighDim:
    def test_one_dimensional_equality(self):
        # uniform on {-2..2} with +-3 steps attains s(2) = 9/5
        tgt = D.lattice_uniform(2)
        step = D.lattice_step({3: F(1, 2), -3: F(1, 2)})
        rep = E.highdim_check(tgt, step, 2)
        assert rep.passed and rep.margin == 0

    @pytest.mark.parametrize("r", [2, 3])
    def test_two_dimensional_radial(self, r):
        w = {(x, y): F(1) for x in range(-2, 3) for y in range(-2, 3) if x * x + y * y <= 4}
        tot = sum(w.values())
        tgt = D.lattice_pmf({p: v / tot for p, v in w.items()}, 2)
        step = D.axis_odd_steps([(0, 3, F(1, 4)), (0, -3, F(1, 4)), (1, 1, F(1, 4)), (1, -1, F(1, 4))], 2)
        rep = E.highdim_check(tgt, step, r)
        assert rep.passed

    def test_even_steps_rejected(self):
        with pytest.raises(PreconditionFailed):
            E.highdim_check(D.lattice_uniform(2), D.lattice_step({2: F(1, 2), -2: F(1, 2)}), 2)

    def test_identity_scan_needs_flag(self):
        with pytest.raises(RangeError):
            E.sg_identity_scan([F(102, 100)])
        rows = E.sg_identity_scan([F(102, 100)], conjecture=True)
        assert len(rows) == 1
