from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwmhlab import distributions as D
from rwmhlab import exact, formulas, mh
from rwmhlab.errors import NotReversible, SupportMismatch

H = F(1, 2)


@st.composite
def rational_chains(draw):
    n = draw(st.integers(2, 5))
    w = draw(st.lists(st.integers(1, 6), min_size=n, max_size=n))
    tgt = D.lattice_pmf({i: F(x, sum(w)) for i, x in enumerate(w)})
    rows = []
    for _ in range(n):
        q = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
        if sum(q) == 0:
            q[0] = 1
        rows.append([F(v, sum(q)) for v in q])
    return exact.build_kernel(tgt, rows)


class TestKernel:
    def test_swap(self):
        ch = exact.build_kernel(D.lattice_pmf({0: H, 1: H}), mh.swap_proposal())
        assert [list(r) for r in ch.kernel] == [[0, 1], [1, 0]]

    def test_rows_sum_to_one(self):
        ch = exact.build_kernel(D.lattice_uniform(2), D.lattice_step({3: H, -3: H}))
        assert all(sum(row) == 1 for row in ch.kernel)

    def test_bernoulli_off_diagonal(self):
        p, th = F(1, 3), F(3, 4)
        ch = exact.build_kernel(D.bernoulli(p), D.lattice_step({1: th, -1: 1 - th}))
        assert ch.kernel[0, 1] == th * min(1, p * (1 - th) / ((1 - p) * th))
        assert ch.pi[0] * ch.kernel[0, 1] == min((1 - p) * th, p * (1 - th))

    def test_matrix_shape_checked(self):
        with pytest.raises(SupportMismatch):
            exact.build_kernel(D.lattice_uniform(1), [[1, 0], [0, 1]])

    def test_continuous_rejected(self):
        with pytest.raises(SupportMismatch):
            exact.build_kernel(D.gaussian(), D.gaussian_step(1))


class TestLagStats:
    def test_corr_tenth(self):
        ch = exact.build_kernel(D.lattice_uniform(2), D.lattice_step({3: H, -3: H}))
        s = exact.exact_lag_stats(ch, 1, [2])
        assert s.incr_moments[2] == F(18, 5) and s.trace_corr == F(1, 10)

    def test_pair(self):
        ch = exact.build_kernel(D.lattice_pmf({1: H, -1: H}), D.lattice_step({2: H, -2: H}))
        assert exact.exact_lag_stats(ch, 1, [2]).incr_moments[2] == 2

    def test_swap_lag_two(self):
        ch = exact.build_kernel(D.lattice_pmf({0: H, 1: H}), mh.swap_proposal())
        assert exact.exact_lag_stats(ch, 2, []).trace_cov == F(1, 4)

    def test_linear_cov(self):
        tgt = D.lattice_pmf({(0, 0): F(1, 4), (1, 0): F(1, 4), (0, 1): F(1, 4), (1, 1): F(1, 4)})
        ch = exact.build_kernel(tgt, D.lattice_step({(1, 0): H, (-1, 0): H}))
        s = exact.exact_lag_stats(ch, 1, [2], [(1, 0), (0, 1)])
        # the second coordinate never moves
        assert s.linear_cov[1] == F(1, 4)

    def test_float_mode(self):
        ch = exact.build_kernel(D.lattice_pmf({0: 0.3, 1: 0.7}), D.lattice_step({1: 0.5, -1: 0.5}))
        assert not ch.exact
        assert exact.check_reversibility(ch) <= 1e-15


class TestReversibility:
    def test_corrupted_kernel_detected(self):
        ch = exact.build_kernel(D.lattice_uniform(1), D.lattice_step({1: H, -1: H}))
        K = ch.kernel.copy()
        K[0, 1] += F(1, 10)
        K[0, 0] -= F(1, 10)
        bad = exact.FiniteChain(ch.states, ch.pi, ch.q, K, True)
        assert exact.check_reversibility(bad) >= F(1, 100)
        with pytest.raises(NotReversible):
            exact.require_reversible(bad)

    @settings(max_examples=40, deadline=None)
    @given(rational_chains())
    def test_exact_chains(self, ch):
        assert exact.check_reversibility(ch) == 0
        assert exact.stationarity_gap(ch) == 0
        J = np.array([[ch.pi[i] * ch.kernel[i, j] for j in range(ch.n)] for i in range(ch.n)], dtype=object)
        assert (J == J.T).all()
        for t in (0, 2, 4):
            s = exact.exact_lag_stats(ch, t, [])
            assert s.trace_cov >= 0
            if t == 2:
                assert s.trace_cov == s.cond_mean_trace_var


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=7), st.sampled_from([1, 2, 3]), st.sampled_from([2, 3]))
def test_oracle_matches_formula(weights, step, r):
    tgt = D.lattice_pmf({i: F(w, sum(weights)) for i, w in enumerate(weights)})
    spec = mh.ChainSpec(tgt, D.lattice_step({step: H, -step: H}))
    ch = exact.build_kernel(tgt, spec.proposal)
    assert exact.exact_lag_stats(ch, 1, [r]).incr_moments[r] == formulas.incr_moment_rwmh(spec, r).value


def test_oracle_vs_simulation():
    step = D.lattice_step({1: F(1, 3), -1: F(1, 6), 2: F(1, 6), -2: F(1, 3)})
    spec = mh.ChainSpec(D.lattice_pmf({0: F(1, 6), 1: F(1, 3), 3: H}), step)
    ch = exact.build_kernel(spec.target, spec.proposal)
    ref = exact.exact_lag_stats(ch, 2, [2])
    st_ = mh.path_stats(mh.simulate(spec, 200_000, 17), [2], [2])[2]
    assert abs(st_.incr_moments[2].value - float(ref.incr_moments[2])) < 4 * st_.incr_moments[2].se
    assert abs(st_.trace_corr.value - float(ref.trace_corr)) < 4 * st_.trace_corr.se
