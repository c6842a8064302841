import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from rwmhlab import bounds as B
from rwmhlab import distributions as D
from rwmhlab import exact, mh
from rwmhlab.errors import PreconditionFailed, RangeError

H = F(1, 2)


def lattice_tenth():
    return mh.ChainSpec(D.lattice_uniform(2), D.lattice_step({3: H, -3: H}))


def uniform_spec():
    return mh.ChainSpec(D.uniform_interval(-1, 1), D.uniform_step(2))


def by_id(reports):
    return {r.theorem_id: r for r in reports}


class TestIncrementBounds:
    def test_general_lattice_exact(self):
        rep = B.check_general_bound(lattice_tenth(), 2)
        assert (rep.lhs, rep.rhs, rep.error_bound) == (F(18, 5), 4, 0.0)
        assert rep.passed and rep.strict_expected == "weak"

    @pytest.mark.parametrize("r", [1, 2, 3, 4.5])
    def test_general_gaussian(self, r):
        rep = B.check_general_bound(mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(4)), r)
        assert rep.strict_ok

    def test_general_range(self):
        spec = mh.ChainSpec(D.lattice_uniform(2), D.lattice_step({1: F(1, 3), -1: F(2, 3)}))
        with pytest.raises(RangeError):
            B.check_general_bound(spec, 1.5)
        assert B.check_general_bound(spec, 2).passed

    def test_unimodal_uniform(self):
        rep = B.check_unimodal_bound(uniform_spec(), 2)
        assert rep.lhs == pytest.approx(1 / 3)
        assert rep.rhs == pytest.approx((4 / 3) ** 2 / 3)
        assert rep.strict_ok

    def test_unimodal_rejects_lattice(self):
        with pytest.raises(PreconditionFailed):
            B.check_unimodal_bound(lattice_tenth(), 2)

    @pytest.mark.parametrize("r", range(1, 11))
    def test_unimodal_constant_below_general(self, r):
        assert (2 * r / (r + 1)) ** r <= 2 ** (r - 1)


class TestCorrelation:
    def test_uniform(self):
        reps = by_id(B.corr_reports(uniform_spec()))
        assert reps["corr>0"].rhs == pytest.approx(0.5)
        assert reps["corr>1/9"].strict_ok
        assert reps["corr>=1/10"].skipped
        assert reps["corr-simple"].lhs == pytest.approx(-3)

    def test_lattice_tenth_is_tight(self):
        reps = by_id(B.corr_reports(lattice_tenth()))
        assert reps["corr>=1/10"].margin == 0 and reps["corr>=1/10"].passed
        assert reps["corr>1/9"].skipped
        assert reps["corr-simple"].lhs == F(-7, 2)

    def test_non_unimodal_skips_ninth(self):
        spec = mh.ChainSpec(D.two_sided_uniform_mixture(3, F(1, 4)), D.gaussian_step(1))
        reps = by_id(B.corr_reports(spec))
        assert reps["corr>1/9"].skipped and reps["corr>0"].passed

    def test_all_pass_on_random_unimodal_lattices(self, rng):
        for _ in range(20):
            k = int(rng.integers(1, 5))
            half = np.sort(rng.integers(1, 6, size=k + 1))[::-1]
            w = {i: int(half[abs(i)]) for i in range(-k, k + 1)}
            tot = sum(w.values())
            tgt = D.lattice_pmf({i: F(v, tot) for i, v in w.items()})
            odd = [1, 3, 5][: int(rng.integers(1, 4))]
            step = D.lattice_step({s * o: F(1, 2 * len(odd)) for o in odd for s in (1, -1)})
            assert all(rep.passed for rep in B.corr_reports(mh.ChainSpec(tgt, step)))


class TestLinear:
    def test_product_gaussian_diagonal(self):
        step = D.axis_steps([(0, D.gaussian_step(4), 0.5), (1, D.gaussian_step(4), 0.5)], 2)
        spec = mh.ChainSpec(D.gaussian([0, 0], [1, 1]), step)
        reps = by_id(B.check_linear_bound(spec, (1 / math.sqrt(2), 1 / math.sqrt(2)), 2))
        assert reps["incr-moment-linear"].lhs == pytest.approx(0.5 * (2 - 4 / math.pi), rel=1e-8)
        assert reps["incr-moment-linear"].rhs == pytest.approx(2.0)
        assert reps["cov-linear>0"].rhs == pytest.approx(1 - 0.25 * (2 - 4 / math.pi), rel=1e-8)

    def test_scaling(self):
        spec = lattice_tenth()
        a = by_id(B.check_linear_bound(spec, (1,), 3))["incr-moment-linear"]
        b = by_id(B.check_linear_bound(spec, (2,), 3))["incr-moment-linear"]
        assert (b.lhs, b.rhs) == (8 * a.lhs, 8 * a.rhs)

    def test_range(self):
        with pytest.raises(RangeError):
            B.check_linear_bound(lattice_tenth(), (1,), 1)


class TestTailMoment:
    def test_uniform(self):
        rep = B.winkler_check(D.uniform_interval(-3, 3), 1, 2)
        assert rep.lhs == pytest.approx(2 / 3) and rep.rhs == pytest.approx(4 / 3)
        assert rep.note == ""

    def test_equality_family(self):
        # r = 2, y = 2: Unif(0, 3) sits on the boundary
        rep = B.winkler_check(D.uniform_interval(0, 3), 2, 2)
        assert rep.note == "equality-family"
        assert rep.margin == pytest.approx(0, abs=1e-12)

    def test_beyond_support(self):
        assert B.winkler_check(D.uniform_interval(-3, 3), 5, 2).lhs == 0

    def test_not_unimodal(self):
        with pytest.raises(PreconditionFailed):
            B.winkler_check(D.two_sided_uniform_mixture(3, F(1, 4)), 1, 2)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.05, 6), st.floats(0.3, 6))
    def test_gaussian_holds(self, y, r):
        assert B.winkler_check(D.gaussian(0, 1), y, r).passed


class TestEvenLags:
    def test_swap(self):
        ch = exact.build_kernel(D.lattice_pmf({0: H, 1: H}), mh.swap_proposal())
        reps = B.even_lag_report(ch, [2, 4])
        assert [r.theorem_id for r in reps] == ["even-lag-cov>=0", "lag2-identity", "even-lag-cov>=0"]
        assert all(r.passed for r in reps)
        assert reps[0].rhs == F(1, 4)

    def test_odd_lag_rejected(self):
        ch = exact.build_kernel(D.lattice_uniform(1), D.lattice_step({1: H, -1: H}))
        with pytest.raises(RangeError):
            B.even_lag_report(ch, [3])


class TestNormalExample:
    def test_closed_forms(self):
        assert B.normal_example_rho(1).rho == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
        assert B.normal_example_rho(2).rho == pytest.approx(1 - 2 / math.pi, abs=1e-12)

    def test_rho_hat_minimum(self):
        res = optimize.minimize_scalar(B.rho_hat, bounds=(0.1, 3), method="bounded", options={"xatol": 1e-10})
        assert res.x == pytest.approx(0.6145, abs=1e-4)
        assert res.fun == pytest.approx(0.6834, abs=1e-4)

    @pytest.mark.parametrize("r", [1, 2, 4, 8])
    def test_below_approximation(self, r):
        nr = B.normal_example_rho(r)
        assert nr.rho < nr.rho_tilde

    @pytest.mark.parametrize("r", [0.25, 0.5, 1, 1.5, 2])
    def test_small_r_bound(self, r):
        nr = B.normal_example_rho(r)
        assert nr.rho <= nr.small_r_bound

    def test_range(self):
        with pytest.raises(RangeError):
            B.normal_example_rho(0)
