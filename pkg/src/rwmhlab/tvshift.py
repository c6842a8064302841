"""Total variation between a law and its shift, and its moment lower bounds.

The central object is the overlap

    ov(a, b; z) = integral (or lattice sum) of min{a pi(x), b pi(x - z)},

so that 1 - d_TV(X, X + z) = ov(1, 1; z). The sequence inequality behind the
lattice bound is exposed on its own through `SequenceInstance`, together with
a classifier for its equality cases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import special

from ._numbers import abs_pow, is_exact, norm_pow, two_pow
from ._quad import DEFAULT_TOL, integrate_1d
from .distributions import Distribution, Gaussian, LatticePMF, SphericalStarUnimodal, _as_point
from .errors import ClassificationFailure, DimensionMismatch, RangeError, UnsupportedQuery
from .records import BoundReport


def _zvec(z, dim):
    if np.isscalar(z) or isinstance(z, Fraction):
        z = (z,)
    z = tuple(z)
    if len(z) != dim:
        raise DimensionMismatch(f"shift has length {len(z)} but the target is {dim}-d")
    return z


def min_overlap(target: Distribution, z, a=1, b=1, tol=DEFAULT_TOL):
    """Return (value, error) of the overlap of a*pi and b*pi shifted by z."""
    z = _zvec(z, target.dim)
    if target.space == "lattice":
        ms = target.masses
        acc = 0
        for x, w in ms.items():
            w2 = ms.get(tuple(u - v for u, v in zip(x, z)))
            if w2:
                acc += min(a * w, b * w2)
        return acc, 0.0
    if all(v == 0 for v in z):
        return min(a, b), 0.0
    if a == 0 or b == 0:
        return 0.0, 0.0
    a, b = float(a), float(b)
    if isinstance(target, Gaussian):
        delta = math.sqrt(sum(float(v) ** 2 / s for v, s in zip(z, target.var_vec)))
        u = delta / 2 - math.log(b / a) / delta
        val = b * special.ndtr(u - delta) + a * special.ndtr(-u)
        return float(val), 0.0
    if isinstance(target, SphericalStarUnimodal) and target.dim > 1:
        if a != b:
            raise UnsupportedQuery("unequal weights for a spherical law in d > 1")
        zn = math.sqrt(sum(float(v) ** 2 for v in z))
        return a * target.first_coordinate_tail(zn / 2), 0.0
    if target.dim != 1:
        raise UnsupportedQuery(f"shift overlap for {target.kind} in d = {target.dim}")
    zf = float(z[0])
    lo, hi = target.box(0.0)
    lo, hi = max(lo, lo + zf), min(hi, hi + zf)
    br = target.breakpoints()
    pts = list(br) + [v + zf for v in br]
    cross = target.log_ratio_crossing(zf, math.log(b / a))
    if cross is not None:
        pts.append(cross)
    f = lambda x: min(a * float(target.pdf(x)), b * float(target.pdf(x - zf)))
    return integrate_1d(f, lo, hi, pts, tol=tol)


def tv_shift(target: Distribution, z):
    """d_TV(X, X + z) for X drawn from the target."""
    ov, _ = min_overlap(target, z)
    return 1 - ov


def _moment_side(target, m, r, c):
    if c is None:
        return target.abs_moment(r, m)
    return target.linear_abs_moment(c, r, m)


def _shift_factor(z, r, c):
    if c is None:
        return norm_pow(z, r)
    c = _zvec(c, len(z))
    return abs_pow(sum(ci * zi for ci, zi in zip(c, z)), r)


def _err(target, rhs, ov_err, factor, tol=DEFAULT_TOL):
    if target.space == "lattice":
        if is_exact(rhs) and is_exact(factor):
            return 0.0
        return 1e-13 * (1.0 + abs(float(rhs)))
    return float(factor) * ov_err + tol * (1.0 + abs(float(rhs)))


def tvlb_margin(target: Distribution, phi, z, m=0, r=2, c=None) -> BoundReport:
    """Check ||z||^r ov(phi, 1 - phi; z) <= 2^(r-2) E||X - m||^r.

    With c, the shift length and the moment are taken along <c, .>, and m is
    a scalar.
    """
    if r < 2:
        raise RangeError("the weighted shift bound needs r >= 2")
    if not 0 <= phi <= 1:
        raise RangeError("phi must lie in [0, 1]")
    z = _zvec(z, target.dim)
    ov, ov_err = min_overlap(target, z, phi, 1 - phi)
    factor = _shift_factor(z, r, c)
    lhs = factor * ov
    rhs = two_pow(r - 2) * _moment_side(target, m, r, c)
    strict = "weak" if target.space == "lattice" else "strict"
    tid = "tv-weighted" if c is None else "tv-weighted-linear"
    return BoundReport(tid, r, lhs, rhs, strict, _err(target, rhs, ov_err, factor),
                       method="exact-sum" if target.space == "lattice" else "quadrature")


def tvlb_margin_symm(target: Distribution, z, m=0, r=1, c=None) -> BoundReport:
    """Check ||z||^r (1 - d_TV(X, X + z)) <= 2^(r-1) E||X - m||^r for r >= 1."""
    if r < 1:
        raise RangeError("the shift bound needs r >= 1")
    z = _zvec(z, target.dim)
    ov, ov_err = min_overlap(target, z)
    factor = _shift_factor(z, r, c)
    lhs = factor * ov
    rhs = two_pow(r - 1) * _moment_side(target, m, r, c)
    if target.space == "lattice":
        strict = "weak"
    elif r > 1 or (target.dim >= 2 and c is None):
        strict = "strict"
    else:
        strict = "strict-except-opposite-pair"
    tid = "tv-shift" if c is None else "tv-shift-linear"
    return BoundReport(tid, r, lhs, rhs, strict, _err(target, rhs, ov_err, factor),
                       method="exact-sum" if target.space == "lattice" else "quadrature")


# ------------------------------------------------------------ sequence lemma


@dataclass(frozen=True)
class SequenceInstance:
    """Finitely supported nonnegative sequence p_n with offset b, order r and weight phi."""

    p: dict
    b: object = 0
    r: object = 2
    phi: object = Fraction(1, 2)

    def __post_init__(self):
        clean = {int(n): v for n, v in dict(self.p).items() if v != 0}
        if any(v < 0 for v in clean.values()):
            raise ValueError("sequence entries must be nonnegative")
        object.__setattr__(self, "p", dict(sorted(clean.items())))

    def shifted(self, k: int) -> "SequenceInstance":
        """The same instance re-indexed: p'_n = p_{n+k}, b' = b + k."""
        return SequenceInstance({n - k: v for n, v in self.p.items()}, self.b + k, self.r, self.phi)

    @property
    def in_domain(self) -> bool:
        return self.r >= 2 or (self.r >= 1 and self.phi == Fraction(1, 2))


def _lemma_sides(inst):
    rhs = two_pow(inst.r - 2) * sum((abs_pow(inst.b + n, inst.r) * v for n, v in inst.p.items()), 0)
    lhs = 0
    for n, v in inst.p.items():
        prev = inst.p.get(n - 1)
        if prev:
            lhs += min((1 - inst.phi) * prev, inst.phi * v)
    return lhs, rhs


def lemma_gap(inst: SequenceInstance, probe: bool = False):
    """2^(r-2) sum |b+n|^r p_n - sum min{(1-phi) p_(n-1), phi p_n}.

    Nonnegative when r >= 2, or r >= 1 with phi = 1/2. Outside that range the
    value is only returned in probe mode, for reproducing counterexamples.
    """
    if not inst.in_domain and not probe:
        raise RangeError(f"r = {inst.r}, phi = {inst.phi} is outside the lemma's range")
    lhs, rhs = _lemma_sides(inst)
    return rhs - lhs


def lemma_scale(inst: SequenceInstance) -> float:
    _, rhs = _lemma_sides(inst)
    return 1.0 + float(rhs)


def lemma_gap_batch(P, offset, b, r, phi):
    """Vectorized gaps for many instances at once.

    P has shape (N, L): row i holds p_n for n = offset[i] + j. b, r, phi and
    offset are length-N arrays. Returns (gap, scale) with scale = 1 + rhs.
    """
    P = np.asarray(P, dtype=float)
    N, L = P.shape
    n = np.asarray(offset, dtype=float)[:, None] + np.arange(L)[None, :]
    b = np.asarray(b, dtype=float)[:, None]
    r = np.asarray(r, dtype=float)[:, None]
    phi = np.asarray(phi, dtype=float)[:, None]
    rhs = np.exp2(r[:, 0] - 2) * (np.abs(b + n) ** r * P).sum(axis=1)
    lhs = np.minimum((1 - phi) * P[:, :-1], phi * P[:, 1:]).sum(axis=1)
    return rhs - lhs, 1.0 + rhs


@dataclass
class EqualityClass:
    tag: str
    gap: object
    witness: str = ""
    matches: list = field(default_factory=list)


EQUALITY_TAGS = ("strict", "equality-case-i", "equality-case-ii", "equality-case-iii",
                 "equality-case-iv", "equality-case-v-oddball", "both-infinite")


def normalize_offset(inst: SequenceInstance, tol=1e-12) -> SequenceInstance:
    """Shift so that b lands in [0, 1); values within tol of 1 snap to 0."""
    k = math.floor(inst.b)
    frac = inst.b - k
    if not is_exact(frac) and frac > 1 - tol:
        k += 1
    return inst.shifted(-k)


def _close(x, y, tol):
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(float(x) - float(y)) <= tol * (1 + abs(float(x)) + abs(float(y)))


def classify_equality(inst: SequenceInstance, cond_tol=1e-6) -> EqualityClass:
    """Tag an instance as strict or as one of the enumerated equality cases.

    Zero is judged relative to the bound side: |gap| <= 1e-12 (1 + rhs).
    After normalizing b into [0, 1) the cases are
      i    all p_n = 0
      ii   a single atom, sitting at the offset (support {0} and b = 0)
      iii  r = 2, support in {-1, 0}, phi = b = p_-1 / (p_-1 + p_0)
      iv   support {-1, 0}, p_-1 = p_0, and either phi = b = 1/2, or r = 1 with phi = 1/2
      v    r = 1, phi = 1/2, b = 0, support in {-1, 0, 1}, p_0 >= max(p_-1, p_1)
    """
    gap = lemma_gap(inst)
    scale = lemma_scale(inst)
    if float(gap) > 1e-12 * scale:
        return EqualityClass("strict", gap)
    w = normalize_offset(inst)
    p, b, r, phi = w.p, w.b, w.r, w.phi
    supp = set(p)
    half = Fraction(1, 2)
    pm, p0, p1 = p.get(-1, 0), p.get(0, 0), p.get(1, 0)
    near = lambda x, y: _close(x, y, cond_tol)
    found = []
    if not supp:
        found.append(("equality-case-i", "all entries vanish"))
    if len(inst.p) == 1:
        # a lone atom at n has gap 2^(r-2) |b + n|^r p_n, so closeness of b is
        # judged in gap units rather than with cond_tol alone
        (n0, w0), = inst.p.items()
        off = float(inst.b + n0)
        btol = max(cond_tol, (1e-12 * scale / (float(two_pow(r - 2)) * float(w0))) ** (1 / float(r)))
        if abs(off) <= btol:
            found.append(("equality-case-ii", "single atom at the offset"))
    if supp <= {-1, 0} and supp and near(r, 2):
        ratio = pm / (pm + p0)
        if near(phi, ratio) and near(b, ratio):
            found.append(("equality-case-iii", f"phi = b = {ratio}"))
    if supp == {-1, 0} and near(pm, p0) and near(phi, half) and (near(b, half) or near(r, 1)):
        found.append(("equality-case-iv", "balanced pair" + (" at r = 1" if near(r, 1) else ", phi = b = 1/2")))
    if near(r, 1) and near(phi, half) and near(b, 0) and supp and supp <= {-1, 0, 1} \
            and p0 >= max(pm, p1) and p0 > 0:
        found.append(("equality-case-v-oddball", "centre atom dominates its neighbours"))
    if not found:
        raise ClassificationFailure(f"gap {float(gap):.3g} is zero but no equality case matches {inst}")
    return EqualityClass(found[0][0], gap, found[0][1], [t for t, _ in found])


# ------------------------------------------------------- counterexample probes


def counterexample_small_r(r, p) -> SequenceInstance:
    """p_0 = p, p_-1 = 1 - p, b = 0, phi = 1 - p; negative gap when 2^(r-2) < p < 1."""
    return SequenceInstance({0: p, -1: 1 - p}, 0, r, 1 - p)


def counterexample_half_weight(r) -> SequenceInstance:
    """p_-1 = p_0 = 1/2, b = 0, phi = 1/2; gap 2^(r-3) - 1/4 is negative for r < 1."""
    h = Fraction(1, 2)
    return SequenceInstance({-1: h, 0: h}, 0, r, h)


# ----------------------------------------------- lattice lines decomposition


def line_decomposition(target: LatticePMF, phi, z, c, m, r):
    """Split a lattice bound check along the lines x + nZ z.

    c must satisfy <c, z> != 0; it is rescaled so that <c, z> = 1. Returns
    (instances, factor) with factor = |<c, z>|^r, so that the margin of
    `tvlb_margin(..., c=c)` equals factor * sum of lemma gaps.
    """
    z = _zvec(z, target.dim)
    c = _zvec(c, target.dim)
    cz = sum(ci * zi for ci, zi in zip(c, z))
    if cz == 0:
        raise RangeError("need <c, z> != 0")
    i = next(k for k, v in enumerate(z) if v != 0)
    lines: dict = {}
    for x, w in target.masses.items():
        n = x[i] // z[i]
        rep = tuple(a - n * b for a, b in zip(x, z))
        lines.setdefault(rep, {})[n] = w
    insts = []
    for rep, seq in lines.items():
        num = sum(ci * xi for ci, xi in zip(c, rep)) - m
        b = Fraction(num) / cz if is_exact(num) and is_exact(cz) else num / cz
        insts.append(SequenceInstance(seq, b, r, phi))
    return insts, abs_pow(cz, r)
