import math
from fractions import Fraction as F

import numpy as np
import pytest

from rwmhlab import distributions as D
from rwmhlab import exact, formulas, mh
from rwmhlab.errors import DimensionMismatch

H = F(1, 2)


def swap_spec():
    return mh.ChainSpec(D.lattice_pmf({0: H, 1: H}), mh.swap_proposal())


class TestAcceptance:
    def test_zero_denominator_accepts(self):
        spec = mh.ChainSpec(D.lattice_pmf({0: H, 1: H}), D.lattice_step({1: H, -1: H}))
        assert mh.acceptance_prob(spec, 5, 6) == 1

    def test_uphill_accepts(self):
        spec = mh.ChainSpec(D.lattice_pmf({0: F(1, 4), 1: F(3, 4)}), D.lattice_step({1: H, -1: H}))
        assert mh.acceptance_prob(spec, 0, 1) == 1
        assert mh.acceptance_prob(spec, 1, 0) == F(1, 3)

    def test_gaussian_ratio(self):
        spec = mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(1))
        assert mh.acceptance_prob(spec, 0.0, 1.0) == pytest.approx(math.exp(-0.5))

    def test_outside_support_rejected(self):
        spec = mh.ChainSpec(D.uniform_interval(-1, 1), D.uniform_step(2))
        assert mh.acceptance_prob(spec, 0.5, 1.5) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mh.ChainSpec(D.gaussian([0, 0], 1), D.gaussian_step(1))


class TestSimulate:
    def test_swap_alternates(self):
        for seed in (1, 2, 3):
            x = mh.simulate(swap_spec(), 4, seed).points[:, 0]
            assert all(a != b for a, b in zip(x, x[1:]))

    def test_step_from_zero(self, rng):
        assert mh.step(swap_spec(), (0,), rng) == (1,)

    def test_lattice_points_in_support(self):
        spec = mh.ChainSpec(D.lattice_uniform(2), D.lattice_step({3: H, -3: H}))
        p = mh.simulate(spec, 2, seed=5)
        assert all(tuple(int(v) for v in row) in spec.target.masses for row in p.points)

    def test_reproducible(self):
        spec = mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(4))
        a, b = mh.simulate(spec, 5000, 11), mh.simulate(spec, 5000, 11)
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, mh.simulate(spec, 5000, 12).points)

    def test_rejections_repeat(self):
        spec = mh.ChainSpec(D.uniform_interval(-1, 1), D.uniform_step(2))
        p = mh.simulate(spec, 2000, 3)
        x = p.points[:, 0]
        repeats = np.sum(x[1:] == x[:-1])
        assert repeats == len(p) - 1 - p.accepted
        assert 0 < repeats < len(p) - 1

    def test_two_dimensional_path(self):
        spec = mh.ChainSpec(D.gaussian([0, 0], [1, 2]), D.gaussian_step([1, 1], dim=2))
        p = mh.simulate(spec, 1000, 4)
        assert p.points.shape == (1000, 2)


class TestPathStats:
    def test_swap_correlation(self):
        st = mh.path_stats(mh.simulate(swap_spec(), 1000, 1), [1], [2])[1]
        assert st.trace_corr.value == pytest.approx(-1, abs=1e-12)
        assert st.incr_moments[2].value == 1

    def test_lag_zero(self):
        spec = mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(4))
        st = mh.path_stats(mh.simulate(spec, 2000, 1), [0], [2])[0]
        assert st.trace_corr.value == pytest.approx(1)

    def test_pythagoras_residual(self):
        for spec in (mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(4)),
                     mh.ChainSpec(D.lattice_uniform(3), D.lattice_step({1: H, -1: H}))):
            st = mh.path_stats(mh.simulate(spec, 20_000, 9), [1], [2])[1]
            assert st.pythagoras_residual <= 1e-9 * (1 + st.trace_var)

    def test_gaussian_mean_and_stationarity(self):
        spec = mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(4))
        p = mh.simulate(spec, 10**6, 2024)
        est = mh.mean_estimate(p)
        assert abs(est.value) < 3 * est.se
        x = p.points[:, 0]
        n = x.size
        blocks = [x[: n // 4], x[n // 2: 3 * n // 4], x[-n // 4:]]
        for blk in blocks:
            se = mh.batch_means_se(blk ** 2)
            assert abs(np.mean(blk ** 2) - 1) < 4 * se

    def test_lattice_estimates_against_exact(self):
        # +-3 alone would split uniform{-2..2} into closed classes; +-1 makes it ergodic
        spec = mh.ChainSpec(D.lattice_uniform(2), D.lattice_step({3: F(1, 4), -3: F(1, 4), 1: F(1, 4), -1: F(1, 4)}))
        ref = exact.exact_lag_stats(exact.build_kernel(spec.target, spec.proposal), 1, [2])
        st = mh.path_stats(mh.simulate(spec, 200_000, 8), [1], [2])[1]
        assert abs(st.incr_moments[2].value - float(ref.incr_moments[2])) < 4 * st.incr_moments[2].se
        assert abs(st.trace_corr.value - float(ref.trace_corr)) < 4 * st.trace_corr.se

    def test_detailed_balance_counts(self):
        spec = mh.ChainSpec(D.gaussian(0, 1), D.gaussian_step(4))
        rows = mh.detailed_balance_counts(mh.simulate(spec, 200_000, 5), [-1.0, 0.0, 1.0])
        assert rows and all(ok for *_, ok in rows)

    def test_batch_means_iid(self, rng):
        y = rng.normal(size=40_000)
        assert mh.batch_means_se(y) == pytest.approx(1 / math.sqrt(y.size), rel=0.15)

    def test_axis_steps_chain(self):
        step = D.axis_steps([(0, D.gaussian_step(1), 0.5), (1, D.gaussian_step(4), 0.5)], 2)
        spec = mh.ChainSpec(D.gaussian([0, 0], [1, 1]), step)
        st = mh.path_stats(mh.simulate(spec, 100_000, 3), [1], [2])[1]
        want = formulas.trace_corr_rwmh(spec)
        assert abs(st.trace_corr.value - want) < 4 * st.trace_corr.se
