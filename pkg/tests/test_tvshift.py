import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from rwmhlab import distributions as D
from rwmhlab import tvshift as T
from rwmhlab.errors import ClassificationFailure, RangeError

H = F(1, 2)


class TestShiftDistance:
    def test_examples(self):
        assert T.tv_shift(D.uniform_interval(0, 1), 0.5) == pytest.approx(0.5)
        assert T.tv_shift(D.gaussian(0, 1), 1) == pytest.approx(2 * stats.norm.cdf(0.5) - 1, abs=1e-14)
        assert T.tv_shift(D.lattice_uniform(2), 1) == F(1, 5)

    @pytest.mark.parametrize("a, b, z", [(1, 1, 0.7), (0.3, 0.7, 1.2), (2.0, 0.5, -0.4)])
    def test_gaussian_closed_form_vs_quadrature(self, a, b, z):
        g = D.gaussian(0.4, 2.0)
        pdf = lambda x: stats.norm.pdf(x, 0.4, math.sqrt(2))
        switch = 0.4 + z / 2 + 2.0 * math.log(a / b) / z  # where a pdf(x) = b pdf(x - z)
        want = integrate.quad(lambda x: min(a * pdf(x), b * pdf(x - z)), -20, 20, points=[switch], limit=200)[0]
        assert T.min_overlap(g, z, a, b)[0] == pytest.approx(want, abs=1e-10)

    def test_isotropic_gaussian_uses_shift_length(self):
        g = D.gaussian([0, 0], [1, 1])
        assert T.tv_shift(g, [0.6, 0.8]) == pytest.approx(T.tv_shift(D.gaussian(0, 1), 1.0), abs=1e-14)

    @pytest.mark.parametrize("dist", [D.uniform_interval(-1, 2), D.two_sided_uniform_mixture(3, F(1, 5)),
                                      D.lattice_pmf({0: F(1, 6), 1: F(1, 3), 3: H})])
    def test_symmetric_in_sign_of_shift(self, dist):
        for z in (1, 2):
            assert float(T.tv_shift(dist, z)) == pytest.approx(float(T.tv_shift(dist, -z)), abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(1, 6), min_size=1, max_size=6), st.integers(-5, 5), st.integers(-4, 4))
    def test_translation_invariance(self, weights, shift, z):
        base = {i: F(w, sum(weights)) for i, w in enumerate(weights)}
        a = D.lattice_pmf(base)
        b = D.lattice_pmf({i + shift: w for i, w in base.items()})
        assert T.tv_shift(a, z) == T.tv_shift(b, z)
        assert 0 <= T.tv_shift(a, z) <= 1


class TestBounds:
    def test_opposite_pair_equality(self):
        rep = T.tvlb_margin(D.lattice_pmf({-1: H, 1: H}), H, 2, r=2)
        assert rep.margin == 0 and rep.passed and not rep.strict_ok

    def test_uniform_unit_shift_equality(self):
        # Unif(-1,1) with z = 1: |z| (1 - d_TV) = 1/2 = E|X|
        rep = T.tvlb_margin_symm(D.uniform_interval(-1, 1), 1, r=1)
        assert rep.margin == pytest.approx(0, abs=1e-12) and rep.passed
        assert rep.strict_expected == "strict-except-opposite-pair"
        assert T.tvlb_margin_symm(D.uniform_interval(-1, 1), 0.5, r=1).margin == pytest.approx(1 / 8)

    def test_continuous_strict_for_r_above_one(self):
        for z in (0.5, 1.8, 3.0):
            rep = T.tvlb_margin_symm(D.gaussian(0, 1), z, r=2)
            assert rep.strict_expected == "strict" and rep.strict_ok

    def test_range_checks(self):
        with pytest.raises(RangeError):
            T.tvlb_margin(D.gaussian(0, 1), H, 1, r=1.5)
        with pytest.raises(RangeError):
            T.tvlb_margin(D.gaussian(0, 1), 1.5, 1, r=2)
        with pytest.raises(RangeError):
            T.tvlb_margin_symm(D.gaussian(0, 1), 1, r=0.5)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(0, 5), min_size=1, max_size=6).filter(any), st.integers(-3, 3),
           st.integers(1, 3), st.fractions(0, 1, max_denominator=6), st.sampled_from([2, 3]))
    def test_lattice_bound_holds(self, weights, shift, z, phi, r):
        tgt = D.lattice_pmf({i + shift: F(w, sum(weights)) for i, w in enumerate(weights)})
        assert T.tvlb_margin(tgt, phi, z, r=r).margin >= 0


class TestLineDecomposition:
    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(0, 4), min_size=1, max_size=9).filter(any), st.integers(1, 2),
           st.fractions(0, 1, max_denominator=5), st.integers(-2, 2))
    def test_margin_is_sum_of_line_gaps(self, weights, z, phi, m):
        pts = [(i % 3, i // 3) for i in range(len(weights))]
        tgt = D.lattice_pmf({p: F(w, sum(weights)) for p, w in zip(pts, weights)}, 2)
        zv, c = (z, 0), (1, 1)
        insts, factor = T.line_decomposition(tgt, phi, zv, c, m, 2)
        rep = T.tvlb_margin(tgt, phi, zv, m=m, r=2, c=c)
        assert rep.margin == factor * sum(T.lemma_gap(i) for i in insts)

    def test_one_dimensional(self):
        tgt = D.lattice_pmf({-1: F(1, 5), 0: F(1, 5), 2: F(3, 5)})
        insts, factor = T.line_decomposition(tgt, F(1, 3), 2, (1,), 0, 2)
        assert factor == 4 and len(insts) == 2
        assert factor * sum(T.lemma_gap(i) for i in insts) == T.tvlb_margin(tgt, F(1, 3), 2, r=2).margin

    def test_orthogonal_c_rejected(self):
        with pytest.raises(RangeError):
            T.line_decomposition(D.lattice_pmf({(0, 0): 1}, 2), H, (1, 0), (0, 1), 0, 2)


class TestSequenceLemma:
    @pytest.mark.parametrize("inst, tag", [
        (T.SequenceInstance({0: F(0)}, F(0), 2, H), "equality-case-i"),
        (T.SequenceInstance({0: F(1)}, F(0), 3, F(1, 3)), "equality-case-ii"),
        (T.SequenceInstance({-1: F(2), 0: F(3)}, F(2, 5), 2, F(2, 5)), "equality-case-iii"),
        (T.SequenceInstance({-1: F(1), 0: F(1)}, H, 3, H), "equality-case-iv"),
        (T.SequenceInstance({-1: F(1), 0: F(2), 1: F(1)}, F(0), 1, H), "equality-case-v-oddball"),
        (T.SequenceInstance({-1: F(1), 0: F(3)}, F(13, 10), 1, H), "strict"),
    ])
    def test_classify(self, inst, tag):
        assert T.classify_equality(inst).tag == tag

    def test_classification_shift_invariant(self):
        inst = T.SequenceInstance({-1: F(2), 0: F(3)}, F(2, 5), 2, F(2, 5))
        for k in (-3, 1, 4):
            sh = inst.shifted(k)
            assert T.lemma_gap(sh) == T.lemma_gap(inst)
            assert T.classify_equality(sh).tag == "equality-case-iii"

    def test_lone_atom_near_offset_in_floats(self):
        inst = T.SequenceInstance({2: 0.3}, -2 + 1e-7, 2, 0.4)
        assert T.classify_equality(inst).tag == "equality-case-ii"

    def test_unclassifiable_zero_raises(self):
        # the gap is quadratic in the offset error, so b off by 1e-7 reads as zero;
        # a condition tolerance tighter than that leaves no case to match
        inst = T.SequenceInstance({-1: 0.4, 0: 0.6}, 0.4 + 1e-7, 2, 0.4)
        assert T.classify_equality(inst).tag == "equality-case-iii"
        with pytest.raises(ClassificationFailure):
            T.classify_equality(inst, cond_tol=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.dictionaries(st.integers(-3, 3), st.fractions(0, 3, max_denominator=7), min_size=1, max_size=5),
           st.fractions(-4, 4, max_denominator=8), st.sampled_from([2, 3, F(5, 2)]),
           st.fractions(0, 1, max_denominator=8))
    def test_gap_nonnegative_and_classified(self, p, b, r, phi):
        inst = T.SequenceInstance(p, b, r, phi)
        assert T.lemma_gap(inst) >= 0
        T.classify_equality(inst)

    def test_batch_matches_scalar(self, rng):
        P = rng.random((50, 4))
        off = rng.integers(-3, 3, 50)
        b = rng.uniform(0, 1, 50)
        r = rng.uniform(2, 4, 50)
        phi = rng.random(50)
        gaps, _ = T.lemma_gap_batch(P, off, b, r, phi)
        for i in range(50):
            inst = T.SequenceInstance({int(off[i]) + j: P[i, j] for j in range(4)}, b[i], r[i], phi[i])
            assert gaps[i] == pytest.approx(float(T.lemma_gap(inst)), rel=1e-12, abs=1e-14)

    def test_out_of_range_requires_probe(self):
        inst = T.counterexample_small_r(F(3, 2), F(9, 10))
        with pytest.raises(RangeError):
            T.lemma_gap(inst)
        assert T.lemma_gap(inst, probe=True) < 0

    def test_half_weight_counterexample(self):
        inst = T.counterexample_half_weight(F(1, 2))
        assert float(T.lemma_gap(inst, probe=True)) == pytest.approx(2 ** (-2.5) - 0.25)
        assert T.lemma_gap(inst, probe=True) < 0
