"""The extremal ratio s(r) for odd-step chains on symmetric unimodal lattice targets.

Notation: S(k; r) = 1^r + ... + k^r, g(k; r) = (2k-1)^r / S(k; r) and
f(k, y; r) = (2y+1)^r (k - y) / S(k; r). s(r) is the supremum of f over
k >= 1 and 0 <= y <= k-1.

Integral r is evaluated in exact rational arithmetic. Otherwise mpmath is
used at 60 significant digits, which keeps 2^r far from overflow and makes
the floor/ceiling calls in the search thresholds reliable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from ._numbers import integer_exponent, is_exact, norm_pow, parse_number
from .errors import PatternViolation, PreconditionFailed, RangeError
from .records import BoundReport

DPS = 60
SMALL_GAP_END = Fraction(1043, 1000)
K1_END = Fraction(214, 100)


def _r_in(r):
    if isinstance(r, str):
        r = parse_number(r)
    if not r > 0:
        raise RangeError("r must be positive")
    return r


def _mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _exact(r):
    return integer_exponent(r) is not None


def _pow(base: int, r):
    k = integer_exponent(r)
    if k is not None:
        return Fraction(base) ** k
    return mp.power(base, _mpf(r))


def power_sum(k: int, r):
    """S(k; r); an exact integer for integral r."""
    r = _r_in(r)
    if k < 1:
        raise RangeError("k must be at least 1")
    with mp.workdps(DPS):
        e = integer_exponent(r)
        if e is not None:
            return sum(i**e for i in range(1, k + 1))
        rr = _mpf(r)
        return mp.fsum(mp.power(i, rr) for i in range(1, k + 1))


def g_ratio(k: int, r):
    with mp.workdps(DPS):
        return _pow(2 * k - 1, r) / power_sum(k, r)


def f_ratio(k: int, y: int, r):
    if not 0 <= y <= k - 1:
        raise RangeError("need 0 <= y <= k - 1")
    with mp.workdps(DPS):
        return _pow(2 * y + 1, r) * (k - y) / power_sum(k, r)


def f1_envelope(k: int, r):
    """f maximized over real y in [0, k - 1/2]; bounds f(k, y; r) for every integer y."""
    r = _r_in(r)
    with mp.workdps(DPS):
        e = integer_exponent(r)
        if e is not None:
            return Fraction(1, 2) * Fraction(e**e, (e + 1) ** (e + 1)) * Fraction((2 * k + 1) ** (e + 1)) / power_sum(k, r)
        rr = _mpf(r)
        return mp.mpf(1) / 2 * rr**rr / (rr + 1) ** (rr + 1) * mp.power(2 * k + 1, rr + 1) / power_sum(k, r)


def real_maximizer(k: int, r):
    """Real y maximizing (2y+1)^r (k - y)."""
    return (2 * r * k - 1) / (2 * (r + 1))


@dataclass(frozen=True)
class Thresholds:
    k0: int
    K: int | None = None
    Ktilde: int | None = None
    k1: int | None = None


def _k0(rr):
    return int(mp.floor(mp.mpf(1) / 2 + 1 / (1 - mp.power(2, -1 / rr))))


def _K(rr):
    num = mp.power(3, rr / (rr - 1)) - 1
    den = mp.power(3, 1 / (rr - 1)) - 1
    return int(mp.ceil(num / den / 2))


def _Ktilde(rr):
    return int(mp.ceil((rr - 1) / mp.log(3))) + 1


def _k1(rr):
    inner = mp.power(mp.power(3 * (rr + 1) / (2 * rr), rr) / (mp.power(2, rr) + 1), 1 / (rr + 1)) - 1
    if inner <= 0:
        return None
    val = int(mp.ceil(1 / inner / 2)) - 1
    return val if val > 0 else None


def thresholds(r) -> Thresholds:
    r = _r_in(r)
    with mp.workdps(DPS):
        rr = _mpf(r)
        k0 = _k0(rr)
        if not r > 1:
            return Thresholds(k0)
        k1 = _k1(rr) if r <= K1_END else None
        return Thresholds(k0, _K(rr), _Ktilde(rr), k1)


@dataclass
class ExtremalResult:
    r: object
    s_value: object
    argmax_k: int
    argmax_y: int
    branch: str
    thresholds: Thresholds
    window: tuple
    notes: list = field(default_factory=list)


def _g_scan(r, lo, hi):
    """(best value, argmax k) of g over k in [lo, hi], with S accumulated once."""
    e = integer_exponent(r)
    rr = None if e is not None else _mpf(r)
    S = 0 if e is not None else mp.mpf(0)
    best, arg = None, None
    for k in range(1, hi + 1):
        S += k**e if e is not None else mp.power(k, rr)
        if k < lo:
            continue
        g = (Fraction((2 * k - 1) ** e) / S) if e is not None else mp.power(2 * k - 1, rr) / S
        if best is None or g > best:
            best, arg = g, k
    return best, arg


def _f_scan(r, k_hi, ys_for):
    """Max of f over k <= k_hi and y in ys_for(k)."""
    e = integer_exponent(r)
    rr = None if e is not None else _mpf(r)
    S = 0 if e is not None else mp.mpf(0)
    best, arg = None, (None, None)
    for k in range(1, k_hi + 1):
        S += k**e if e is not None else mp.power(k, rr)
        for y in ys_for(k):
            top = (2 * y + 1) ** e if e is not None else mp.power(2 * y + 1, rr)
            v = (Fraction(top * (k - y)) / S) if e is not None else top * (k - y) / S
            if best is None or v > best:
                best, arg = v, (k, y)
    return best, arg


def s_of_r(r, mode: str = "auto") -> ExtremalResult:
    r = _r_in(r)
    if mode not in ("auto", "brute"):
        raise RangeError(f"unknown mode {mode!r}")
    with mp.workdps(DPS):
        th = thresholds(r)
        if mode == "brute":
            k_hi = max(th.k0, th.k1 or 0) + 5
            v, (k, y) = _f_scan(r, k_hi, lambda k: range(k))
            branch = "unit" if not r > 1 else ("small-gap" if r < SMALL_GAP_END else "main")
            return ExtremalResult(r, v, k, y, branch, th, (1, k_hi), ["brute force"])
        if not r > 1:
            one = Fraction(1) if _exact(r) or is_exact(r) else mp.mpf(1)
            return ExtremalResult(r, one, 1, 0, "unit", th, (1, 1))
        if r < SMALL_GAP_END:
            k_hi = th.k1 or 1

            def ys(k):
                ystar = real_maximizer(k, _mpf(r))
                cand = {int(mp.floor(ystar)), int(mp.ceil(ystar))}
                return sorted({min(max(y, 0), k - 1) for y in cand})

            v, (k, y) = _f_scan(r, k_hi, ys)
            return ExtremalResult(r, v, k, y, "small-gap", th, (1, k_hi))
        lo = max(1, th.K - 1)
        notes = []
        if lo > th.k0:
            notes.append(f"window [{lo}, {th.k0}] empty; scanned [1, {th.k0}]")
            lo = 1
        v, k = _g_scan(r, lo, th.k0)
        return ExtremalResult(r, v, k, k - 1, "main", th, (lo, th.k0), notes)


def brute_force_s(r, k_max: int):
    """max of f(k, y; r) over 1 <= k <= k_max and 0 <= y <= k - 1."""
    r = _r_in(r)
    with mp.workdps(DPS):
        v, _ = _f_scan(r, k_max, lambda k: range(k))
        return v


def brute_force_argmax(r, k_max: int):
    r = _r_in(r)
    with mp.workdps(DPS):
        return _f_scan(r, k_max, lambda k: range(k))


@dataclass
class UnimodalityReport:
    r: object
    mode_k: int
    K: int
    Ktilde: int
    last_increase: int
    sign_changes: int
    ok: bool


def unimodality_check(r, k_max: int) -> UnimodalityReport:
    """Sign pattern of g(k+1) - g(k): positive for k <= K - 2, then one sign change."""
    r = _r_in(r)
    if r < SMALL_GAP_END:
        raise RangeError("the pattern is claimed for r >= 1.043")
    with mp.workdps(DPS):
        th = thresholds(r)
        e = integer_exponent(r)
        rr = None if e is not None else _mpf(r)
        S = 0 if e is not None else mp.mpf(0)
        g = []
        for k in range(1, k_max + 2):
            S += k**e if e is not None else mp.power(k, rr)
            g.append(Fraction((2 * k - 1) ** e) / S if e is not None else mp.power(2 * k - 1, rr) / S)
        diffs = [b - a for a, b in zip(g[:-1], g[1:])]  # index k-1 holds g(k+1) - g(k)
        pos = [d > 0 for d in diffs]
        changes = sum(1 for a, b in zip(pos[:-1], pos[1:]) if a != b)
        rising = all(pos[: max(0, th.K - 2)])
        last_inc = max((k for k, p in enumerate(pos, start=1) if p), default=0)
        mode_k = 1 + max(range(k_max), key=lambda i: g[i])
        ok = rising and changes <= 1
        rep = UnimodalityReport(r, mode_k, th.K, th.Ktilde, last_inc, changes, ok)
        if not ok:
            raise PatternViolation(f"g(k; {r}) is not unimodal as claimed: {rep}")
        return rep


def lemma_h_margin(t, a, r):
    """h(t, a; r), a difference of products whose sign drives the unimodality proof."""
    if t < 0 or a < 0 or r < 1:
        raise RangeError("need t, a >= 0 and r >= 1")
    u = lambda c: 1 + (c + a) * t
    return u(3) ** r * (u(2) ** (r + 1) - u(0) ** (r + 1)) - u(1) ** r * (u(4) ** (r + 1) - u(2) ** (r + 1))


def lemma_h_scale(t, a, r):
    u = lambda c: 1 + (c + a) * t
    return 1.0 + float(u(3) ** r * u(2) ** (r + 1) + u(1) ** r * u(4) ** (r + 1))


def asymptotic_ratio(r):
    """s(r) / ((2 sqrt 3 / 9) 2^r), evaluated in log space."""
    with mp.workdps(DPS):
        sv = _mpf(s_of_r(r).s_value)
        lr = mp.log(sv) - (mp.log(2 * mp.sqrt(3) / 9) + _mpf(r) * mp.log(2))
        return mp.exp(lr)


def sandwich(r):
    """((2r/(r+1))^r, 2^(r-1)): lower and upper bounds for s(r)."""
    with mp.workdps(DPS):
        rr = _mpf(r)
        return (2 * rr / (rr + 1)) ** rr, mp.power(2, rr - 1)


def highdim_check(target, prop, r) -> BoundReport:
    """E||X_1 - X_0||^r <= s(r) E||X_0||^r for a radial lattice target
    (nonincreasing in ||x||) and steps along odd multiples of coordinate vectors."""
    from .formulas import incr_moment_rwmh
    from .mh import ChainSpec

    if target.space != "lattice" or prop.space != "lattice":
        raise PreconditionFailed("lattice target and steps required")
    if set(target.points) == {tuple([0] * target.dim)}:
        raise PreconditionFailed("target is degenerate at 0")
    if not target.star_unimodal:
        raise PreconditionFailed("target must depend on ||x|| only and be nonincreasing in it")
    if not (prop.odd_support and prop.symmetric):
        raise PreconditionFailed("steps must be symmetric odd multiples of coordinate vectors")
    spec = ChainSpec(target, prop)
    lhs = incr_moment_rwmh(spec, r).value
    s = s_of_r(r).s_value
    mom = target.abs_moment(r, 0)
    if isinstance(s, Fraction) and is_exact(mom):
        rhs = s * mom
        err = 0.0 if is_exact(lhs) else 1e-12 * (1 + float(rhs))
    else:
        rhs = float(s) * float(mom)
        lhs = float(lhs)
        err = 1e-12 * (1 + abs(rhs))
    return BoundReport("odd-step-extremal", r, lhs, rhs, "weak", err, method="exact-lattice-sum")


def sg_identity_scan(r_grid, conjecture: bool = False):
    """Compare s(r) with max_k g(k; r) on (1, 1.043). Exploratory only."""
    if not conjecture:
        raise RangeError("this scan explores an unproven pattern; pass conjecture=True")
    out = []
    for r in r_grid:
        res = s_of_r(r)
        gmax, _ = _g_scan(r, 1, max(1, res.thresholds.k0))
        out.append((r, res.s_value, gmax))
    return out
