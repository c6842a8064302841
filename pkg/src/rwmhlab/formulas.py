"""Closed-form and quadrature routes to one-step moments of stationary MH chains.

All routes compute E||X_1 - X_0||^r for X_0 drawn from the target. They
differ in what they assume:

- `incr_moment_mh` works from the joint law pi(x) k(x, y) for any proposal,
- `incr_moment_rwmh` integrates over the step z for random-walk proposals,
- `incr_moment_rwmh_symm` uses 1 - d_TV(X_0, X_0 + z) when the step law is symmetric,
- `incr_moment_symm_unimodal` uses the tail P(|X_0| > |z|/2) when the target
  is also symmetric and unimodal (or spherically star-unimodal).

On a lattice every route is a finite sum, exact for rational input and
integral r.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ._numbers import abs_pow, is_exact, norm_pow
from ._quad import DEFAULT_TOL, integrate_1d
from .distributions import (
    AxisSteps,
    Gaussian,
    LatticePMF,
    SphericalStarUnimodal,
    bernoulli,
    lattice_step,
    symmetrize,
)
from .errors import (
    BothZero,
    DimensionMismatch,
    NotSymmetric,
    OutOfRange,
    PreconditionFailed,
    ToleranceNotMet,
    UnsupportedQuery,
    ZeroVector,
)
from .mh import ChainSpec, FiniteProposal, proposal_density
from .records import MomentResult
from .tvshift import min_overlap


def _pow_r(r):
    r = float(r)
    return lambda u: abs(u) ** r if u != 0 else (1.0 if r == 0 else 0.0)


# ------------------------------------------------------------ general MH


def incr_moment_mh(spec: ChainSpec, r, q=None, tol=DEFAULT_TOL) -> MomentResult:
    """sum or integral of ||x - y||^r min{pi(x) q(x,y), pi(y) q(y,x)}.

    `q(x, y)` defaults to the proposal density of `spec`. Continuous targets
    are handled in d = 1 by nested quadrature.
    """
    tgt = spec.target
    if q is None:
        q = lambda x, y: proposal_density(spec, x, y)
    if tgt.space == "lattice":
        pts = tgt.points
        acc = 0
        for x in pts:
            px = tgt.masses[x]
            for y in pts:
                if y == x:
                    continue
                a = px * q(x, y)
                if a == 0:
                    continue
                acc += norm_pow(tuple(v - u for u, v in zip(x, y)), r) * min(a, tgt.masses[y] * q(y, x))
        return MomentResult(acc, "mh-joint-sum")
    if tgt.dim != 1:
        raise UnsupportedQuery("general MH quadrature is implemented for d = 1")
    lo, hi = tgt.box(r)
    br = tgt.breakpoints()
    # a random-walk density jumps at y - x = step breakpoint
    sb = [float(v) for v in spec.proposal.breakpoints()] if spec.random_walk else []
    sb = sorted(set(sb) | {-v for v in sb})
    outer_pts = sorted(set(br) | {a + s for a in br for s in sb})
    pw = _pow_r(r)
    errs = []

    def inner(x):
        px = float(tgt.pdf(x))
        if px == 0:
            return 0.0
        f = lambda y: pw(x - y) * min(px * float(q(x, y)), float(tgt.pdf(y)) * float(q(y, x)))
        v, e = integrate_1d(f, lo, hi, list(br) + [x] + [x + s for s in sb], tol=tol * 0.1, check=False)
        errs.append(e)
        return v

    val, err = integrate_1d(inner, lo, hi, outer_pts, tol=tol)
    return MomentResult(val, "mh-nested-quadrature", err + (hi - lo) * max(errs, default=0.0))


# ------------------------------------------------------- random-walk route


def _lattice_rw_sum(tgt: LatticePMF, step: LatticePMF, weight):
    """sum_z weight(z) sum_x min{pi(x) phi(-z), pi(x - z) phi(z)}."""
    acc = 0
    for z, fz in step.masses.items():
        if all(v == 0 for v in z):
            continue
        back = step.masses.get(tuple(-v for v in z), 0)
        if back == 0:
            continue
        wz = weight(z)
        if wz == 0:
            continue
        s = 0
        for x, px in tgt.masses.items():
            prev = tgt.masses.get(tuple(a - b for a, b in zip(x, z)))
            if prev:
                s += min(px * back, prev * fz)
        acc += wz * s
    return acc


def _rw_inner_1d(tgt, step, z, tol):
    """integral over x of min{pi(x) phi(-z), pi(x - z) phi(z)}."""
    a = float(step.pdf(-z))
    b = float(step.pdf(z))
    if a == 0 or b == 0:
        return 0.0, 0.0
    return min_overlap(tgt, z, a, b, tol=tol)


def _z_range(tgt, step, r):
    lo, hi = tgt.box(r)
    span = hi - lo
    slo, shi = step.box(r)
    return max(-span, slo), min(span, shi)


def _rw_1d(tgt, step, weight, r, tol):
    zlo, zhi = _z_range(tgt, step, r)
    br = tgt.breakpoints()
    sb = step.breakpoints()
    pts = {0.0}
    pts |= {a - b for a in br for b in br}
    pts |= set(sb) | {-v for v in sb}
    errs = []

    def outer(z):
        w = weight(z)
        if w == 0:
            return 0.0
        v, e = _rw_inner_1d(tgt, step, z, tol * 0.1)
        errs.append(e)
        return w * v

    val, err = integrate_1d(outer, zlo, zhi, sorted(pts), tol=tol)
    return val, err + (zhi - zlo) * max(errs, default=0.0)


def _is_product_gaussian(t):
    return isinstance(t, Gaussian)


def incr_moment_rwmh(spec: ChainSpec, r, tol=DEFAULT_TOL) -> MomentResult:
    """integral of ||z||^r integral of min{pi(x) phi(-z), pi(x - z) phi(z)} dx dz."""
    tgt, step = spec.target, spec.proposal
    if not spec.random_walk:
        return incr_moment_mh(spec, r, tol=tol)
    if tgt.space == "lattice":
        return MomentResult(_lattice_rw_sum(tgt, step, lambda z: norm_pow(z, r)), "rw-lattice-sum")
    if tgt.dim == 1:
        val, err = _rw_1d(tgt, step, _pow_r(r), r, tol)
        return MomentResult(val, "rw-nested-quadrature", err)
    if isinstance(step, AxisSteps) and _is_product_gaussian(tgt):
        return _axis_product(tgt, step, lambda axis, u: abs(u) ** float(r) if u else 0.0, r, tol)
    if tgt.star_unimodal and step.symmetric and hasattr(step, "norm_expect"):
        return incr_moment_symm_unimodal(spec, r, tol)
    raise UnsupportedQuery(f"no random-walk route for {tgt.kind} with {step.kind} in d = {tgt.dim}")


def _axis_product(tgt: Gaussian, step: AxisSteps, weight, r, tol):
    """Product Gaussian target with axis-aligned steps: a sum of 1-d chains."""
    total, err = 0.0, 0.0
    for axis, law, w in step.components:
        marg = Gaussian(tgt.mean_vec[axis], tgt.var_vec[axis])
        v, e = _rw_1d(marg, law, lambda u, a=axis: weight(a, u), r, tol)
        total += w * v
        err += w * e
    return MomentResult(total, "rw-axis-quadrature", err)


def incr_moment_linear(spec: ChainSpec, c, r, tol=DEFAULT_TOL) -> MomentResult:
    """E|<c, X_1 - X_0>|^r."""
    tgt, step = spec.target, spec.proposal
    c = tuple(np.atleast_1d(c).tolist()) if not isinstance(c, (tuple, list)) else tuple(c)
    if len(c) != tgt.dim:
        raise DimensionMismatch("c has the wrong length")
    if all(v == 0 for v in c):
        raise ZeroVector("c must be nonzero")
    lin = lambda z: abs_pow(sum(ci * zi for ci, zi in zip(c, z)), r)
    if not spec.random_walk:
        raise UnsupportedQuery("linear moments need a random-walk proposal")
    if tgt.space == "lattice":
        return MomentResult(_lattice_rw_sum(tgt, step, lin), "rw-lattice-sum")
    if tgt.dim == 1:
        base = incr_moment_rwmh(spec, r, tol)
        return MomentResult(abs(float(c[0])) ** float(r) * base.value, base.method, base.error)
    if isinstance(step, AxisSteps) and _is_product_gaussian(tgt):
        cf = [float(v) for v in c]
        return _axis_product(tgt, step, lambda axis, u: abs(cf[axis] * u) ** float(r) if u else 0.0, r, tol)
    if isinstance(step, AxisSteps) and tgt.star_unimodal and step.symmetric:
        cf = [float(v) for v in c]
        total = 0.0
        for axis, law, w in step.components:
            f = lambda u, a=axis: abs(cf[a] * u) ** float(r) * tgt.first_coordinate_tail(abs(u) / 2)
            total += w * law.expect(f, [0.0], tol=tol)
        return MomentResult(total, "axis-tail-quadrature")
    raise UnsupportedQuery(f"no linear route for {tgt.kind} with {step.kind} in d = {tgt.dim}")


def incr_moment_rwmh_symm(spec: ChainSpec, r, tol=DEFAULT_TOL) -> MomentResult:
    """integral of ||z||^r phi(z) [1 - d_TV(X_0, X_0 + z)] dz, for symmetric phi."""
    tgt, step = spec.target, spec.proposal
    if not spec.random_walk or not step.symmetric:
        raise NotSymmetric("this route needs a symmetric random-walk step")
    if tgt.space == "lattice":
        acc = 0
        for z, fz in step.masses.items():
            if all(v == 0 for v in z):
                continue
            ov, _ = min_overlap(tgt, z)
            acc += norm_pow(z, r) * fz * ov
        return MomentResult(acc, "tv-lattice-sum")
    if tgt.dim == 1:
        pw = _pow_r(r)
        zlo, zhi = _z_range(tgt, step, r)
        br = tgt.breakpoints()
        pts = {0.0} | {a - b for a in br for b in br} | set(step.breakpoints())
        f = lambda z: pw(z) * float(step.pdf(z)) * min_overlap(tgt, z, tol=tol * 0.1)[0] if z else 0.0
        val, err = integrate_1d(f, zlo, zhi, sorted(pts), tol=tol)
        return MomentResult(val, "tv-quadrature", err)
    if isinstance(step, AxisSteps):
        total = 0.0
        for axis, law, w in step.components:
            def f(u, a=axis):
                if u == 0:
                    return 0.0
                z = [0.0] * tgt.dim
                z[a] = u
                return abs(u) ** float(r) * min_overlap(tgt, z)[0]
            total += w * law.expect(f, [0.0], tol=tol)
        return MomentResult(total, "tv-axis-quadrature")
    if tgt.star_unimodal and hasattr(step, "norm_expect"):
        return incr_moment_symm_unimodal(spec, r, tol)
    raise UnsupportedQuery(f"no shift-overlap route for {tgt.kind} with {step.kind} in d = {tgt.dim}")


def incr_moment_symm_unimodal(spec: ChainSpec, r, tol=DEFAULT_TOL) -> MomentResult:
    """E[||Z||^r P(|X_0,1| > ||Z||/2)] for a symmetric unimodal target.

    In d = 1 the target must be symmetric and unimodal about 0; on the lattice
    the steps must be odd, which turns the formula into
    2 sum_y phi(2y+1) (2y+1)^r P(|X_0| > y). In d > 1 the target must be
    spherically star-unimodal (continuous) or radial (lattice, odd axis steps).
    """
    tgt, step = spec.target, spec.proposal
    if not spec.random_walk or not step.symmetric:
        raise NotSymmetric("this route needs a symmetric random-walk step")
    if tgt.space == "lattice":
        if not step.odd_support:
            raise PreconditionFailed("lattice steps must be odd multiples of coordinate vectors")
        if tgt.dim == 1:
            if not (tgt.symmetric and tgt.is_unimodal_about(0)):
                raise PreconditionFailed("target must be symmetric and unimodal about 0")
            acc = 0
            for (z,), fz in step.masses.items():
                if z > 0:
                    y = (z - 1) // 2
                    acc += 2 * fz * abs_pow(z, r) * tgt.tail(y)
            return MomentResult(acc, "odd-step-tail-sum")
        if not tgt.star_unimodal:
            raise PreconditionFailed("lattice target must be radial and nonincreasing")
        acc = 0
        for z, fz in step.masses.items():
            i = next(k for k, v in enumerate(z) if v != 0)
            acc += fz * norm_pow(z, r) * tgt.coordinate_tail(i, Fraction(abs(z[i]), 2))
        return MomentResult(acc, "odd-axis-tail-sum")
    if tgt.dim == 1:
        if not (tgt.symmetric and tgt.is_unimodal_about(0)):
            raise PreconditionFailed("target must be symmetric and unimodal about 0")
        br = tgt.breakpoints()
        pts = [0.0] + [2 * b for b in br] + [-2 * b for b in br]
        pw = _pow_r(r)
        val = step.expect(lambda z: pw(z) * tgt.tail(abs(z) / 2), pts, tol=tol, r=r)
        return MomentResult(val, "tail-quadrature")
    if not tgt.star_unimodal:
        raise PreconditionFailed("target must be spherically star-unimodal")
    if not hasattr(step, "norm_expect"):
        raise UnsupportedQuery(f"no norm law for {step.kind}")
    pw = _pow_r(r)
    val = step.norm_expect(lambda t: pw(t) * tgt.first_coordinate_tail(t / 2), tol=tol)
    return MomentResult(val, "radial-tail-quadrature")


def trace_cov_rwmh(spec: ChainSpec, tol=DEFAULT_TOL, cross_check=True):
    """tr Cov(X_0, X_1) = tr Var(X_0) - E||X_1 - X_0||^2 / 2.

    When the target is symmetric unimodal and the step symmetric, the tail
    formula is evaluated as well and must agree.
    """
    tgt = spec.target
    var = tgt.trace_var()
    if spec.random_walk:
        inc = incr_moment_rwmh(spec, 2, tol).value
    else:
        inc = incr_moment_mh(spec, 2, tol=tol).value
    cov = var - inc / 2
    if cross_check and spec.random_walk and _symm_unimodal_ok(spec):
        alt = var - incr_moment_symm_unimodal(spec, 2, tol).value / 2
        if abs(float(alt) - float(cov)) > 1e-8 * (1 + abs(float(var))):
            raise ToleranceNotMet(f"covariance routes disagree: {float(cov)} vs {float(alt)}")
    return cov


def trace_corr_rwmh(spec: ChainSpec, tol=DEFAULT_TOL):
    cov = trace_cov_rwmh(spec, tol)
    return cov / spec.target.trace_var()


def _symm_unimodal_ok(spec):
    tgt, step = spec.target, spec.proposal
    try:
        if not step.symmetric:
            return False
        if tgt.space == "lattice":
            return tgt.dim == 1 and step.odd_support and tgt.symmetric and tgt.is_unimodal_about(0)
        if tgt.dim == 1:
            return tgt.symmetric and tgt.is_unimodal_about(0)
        return tgt.star_unimodal and hasattr(step, "norm_expect")
    except (AttributeError, NotImplementedError):
        return False


# --------------------------------------------------------- symmetrization


def _ratio(num, den):
    if den == 0:
        return math.inf if num != 0 else math.nan
    return num / den


def symmetrization_factors(target, prop, r=1):
    """(alpha, beta): the factors by which symmetrizing the target, respectively
    the step law, multiplies E||X_1 - X_0||^r.

    A factor whose base and symmetrized moments both vanish is NaN; if that
    happens to both factors, BothZero is raised.
    """
    base = incr_moment_rwmh(ChainSpec(target, prop), r).value
    sym_t = incr_moment_rwmh(ChainSpec(symmetrize(target), prop), r).value
    sym_p = incr_moment_rwmh(ChainSpec(target, symmetrize(prop)), r).value
    alpha = _ratio(sym_t, base)
    beta = _ratio(sym_p, base)
    if isinstance(alpha, float) and math.isnan(alpha) and isinstance(beta, float) and math.isnan(beta):
        raise BothZero("both symmetrized chains are as stuck as the original")
    return alpha, beta


def bernoulli_chain(p, theta) -> ChainSpec:
    """Bernoulli(p) target with steps +1 (prob theta) and -1 (prob 1 - theta)."""
    return ChainSpec(bernoulli(p), lattice_step({1: theta, -1: 1 - theta}))


def _sqrt2_cmp(alpha):
    """Sign of 2 alpha - 1 - sqrt 2, exact for rational alpha."""
    t = 2 * alpha - 1
    if is_exact(alpha):
        if t <= 0:
            return -1
        s = t * t - 2
        return (s > 0) - (s < 0)
    v = t - math.sqrt(2)
    return (v > 0) - (v < 0)


def construct_alpha_example(alpha):
    """(p, theta) whose Bernoulli chain has target-symmetrization factor alpha."""
    if not alpha > Fraction(1, 2):
        raise OutOfRange("alpha must exceed 1/2")
    if alpha == math.inf:
        raise OutOfRange("alpha = infinity has no Bernoulli example")
    p = 2 / (1 + 2 * alpha)
    if _sqrt2_cmp(alpha) <= 0:
        return p, p
    return p, (2 * alpha - 1) / (2 * alpha)


def construct_beta_example(beta):
    """(p, theta) whose Bernoulli chain has step-symmetrization factor beta."""
    if not beta > Fraction(1, 2):
        raise OutOfRange("beta must exceed 1/2")
    if beta == math.inf:
        raise OutOfRange("beta = infinity has no Bernoulli example")
    q = 1 / (2 * beta)
    if beta <= 1:
        return q, q
    return Fraction(1, 2) if is_exact(beta) else 0.5, q


def stuck_five_point_example(alpha=math.inf):
    """Five-point target on {-2..2} with +-1 steps whose target-symmetrization
    factor is alpha; for alpha = infinity the base chain never moves."""
    if alpha == math.inf:
        pmf = {-2: 0, -1: Fraction(1, 2), 0: 0, 1: 0, 2: Fraction(1, 2)}
    else:
        if not alpha >= 1:
            raise OutOfRange("alpha must be at least 1")
        a = 1 / (4 * alpha)
        b = (2 * alpha - 1) / (4 * alpha)
        pmf = {-2: a, -1: b, 0: 0, 1: a, 2: b}
    h = Fraction(1, 2)
    return ChainSpec(LatticePMF(pmf), lattice_step({1: h, -1: h}))
