"""Inequality checks on one-step moments and lag correlations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from ._numbers import integer_exponent, is_exact, two_pow
from ._quad import DEFAULT_TOL, integrate_1d
from .distributions import AxisSteps, Distribution, Gaussian, LatticePMF, UniformMixture
from .errors import PreconditionFailed, RangeError
from .exact import build_kernel, exact_lag_stats, require_reversible
from .extremal import s_of_r
from .formulas import (
    _symm_unimodal_ok,
    incr_moment_linear,
    incr_moment_rwmh,
    incr_moment_symm_unimodal,
    trace_cov_rwmh,
)
from .mh import ChainSpec
from .records import BoundReport


def _err(*vals, exact=False, tol=DEFAULT_TOL):
    if exact:
        return 0.0
    return tol * (1.0 + sum(abs(float(v)) for v in vals))


def _lattice_incr(spec, r):
    st = exact_lag_stats(build_kernel(spec.target, spec.proposal), 1, [r])
    return st.incr_moments[r]


def _incr(spec, r, tol=DEFAULT_TOL):
    if spec.space == "lattice":
        return _lattice_incr(spec, r), 0.0
    res = incr_moment_rwmh(spec, r, tol)
    return res.value, res.error


def _strictness(spec):
    return "weak" if spec.space == "lattice" else "strict"


def _all_exact(*vals):
    return all(is_exact(v) for v in vals)


def check_general_bound(spec: ChainSpec, r, m=None, tol=DEFAULT_TOL) -> BoundReport:
    """E||X_1 - X_0||^r <= 2^(r-1) E||X_0 - m||^r, for r >= 2, or r >= 1 with symmetric steps."""
    if not spec.random_walk:
        raise PreconditionFailed("the bound is stated for random-walk proposals")
    if not (r >= 2 or (r >= 1 and spec.proposal.symmetric)):
        raise RangeError("need r >= 2, or r >= 1 with a symmetric step law")
    if m is None:
        m = spec.target.mean()
    lhs, qerr = _incr(spec, r, tol)
    rhs = two_pow(r - 1) * spec.target.abs_moment(r, m)
    ex = _all_exact(lhs, rhs)
    return BoundReport("incr-moment-general", r, lhs, rhs, _strictness(spec), qerr + _err(lhs, rhs, exact=ex, tol=tol),
                       method="exact-oracle" if spec.space == "lattice" else "quadrature")


def _unimodal_factor(r):
    k = integer_exponent(r)
    if k is not None:
        return Fraction(2 * k, k + 1) ** k
    r = float(r)
    return (2 * r / (r + 1)) ** r


def check_unimodal_bound(spec: ChainSpec, r, m=0, tol=DEFAULT_TOL) -> BoundReport:
    """E||X_1 - X_0||^r < (2r/(r+1))^r E||X_0 - m||^r for a unimodal target with mode m
    and a symmetric step law (spherically star-unimodal about 0 when d > 1)."""
    tgt, step = spec.target, spec.proposal
    if tgt.space != "continuous":
        raise PreconditionFailed("the unimodal bound fails on lattices; use the odd-step bound")
    if not (spec.random_walk and step.symmetric):
        raise PreconditionFailed("needs a symmetric random-walk step")
    if tgt.dim == 1:
        if not tgt.is_unimodal_about(m):
            raise PreconditionFailed(f"target is not unimodal about {m}")
        res = incr_moment_rwmh(spec, r, tol)
    else:
        if not tgt.star_unimodal or np.any(np.asarray(m, dtype=float) != 0):
            raise PreconditionFailed("in d > 1 the target must be spherically star-unimodal about 0")
        res = incr_moment_symm_unimodal(spec, r, tol)
    rhs = float(_unimodal_factor(r)) * tgt.abs_moment(r, m)
    return BoundReport("incr-moment-unimodal", r, res.value, rhs, "strict", res.error + _err(res.value, rhs, tol=tol),
                       method=res.method)


def _step_second_moment(step):
    if isinstance(step, AxisSteps):
        return sum(w * law.abs_moment(2, 0) for _, law, w in step.components)
    return step.abs_moment(2, 0)


def _trace_corr(spec, tol):
    if spec.space == "lattice":
        st = exact_lag_stats(build_kernel(spec.target, spec.proposal), 1, [2])
        return st.trace_corr, st.trace_var, st.error_bound
    var = spec.target.trace_var()
    cov = trace_cov_rwmh(spec, tol)
    return cov / var, var, tol * 10


def corr_reports(spec: ChainSpec, tol=DEFAULT_TOL) -> list:
    """Lag-1 correlation lower bounds, each applicable one checked, the others skipped with a reason."""
    tgt, step = spec.target, spec.proposal
    out = []
    if not spec.random_walk:
        for tid in ("corr>0", "corr>1/9", "corr>=1/10", "corr-simple"):
            out.append(BoundReport(tid, 2, skipped="proposal is not a random walk"))
        return out
    corr, var, err = _trace_corr(spec, tol)
    lattice = spec.space == "lattice"
    out.append(BoundReport("corr>0", 2, 0, corr, "weak" if lattice else "strict", err, method="trace-correlation"))

    if lattice:
        out.append(BoundReport("corr>1/9", 2, skipped="lattice target; the continuous unimodal bound does not apply"))
    elif not step.symmetric:
        out.append(BoundReport("corr>1/9", 2, skipped="step law is not symmetric"))
    elif tgt.dim == 1 and tgt.is_unimodal_about(tgt.mean()):
        out.append(BoundReport("corr>1/9", 2, Fraction(1, 9), corr, "strict", err, method="trace-correlation"))
    elif tgt.dim > 1 and tgt.star_unimodal:
        out.append(BoundReport("corr>1/9", 2, Fraction(1, 9), corr, "strict", err, method="trace-correlation"))
    else:
        out.append(BoundReport("corr>1/9", 2, skipped="target is not unimodal about its mean"))

    if not lattice:
        out.append(BoundReport("corr>=1/10", 2, skipped="continuous target; covered by corr>1/9"))
    elif tgt.dim != 1:
        out.append(BoundReport("corr>=1/10", 2, skipped="lattice bound is one-dimensional"))
    elif not (step.symmetric and step.odd_support):
        out.append(BoundReport("corr>=1/10", 2, skipped="steps are not symmetric and odd"))
    elif not (tgt.symmetric and tgt.is_unimodal_about(0)) or len(tgt.points) < 2:
        out.append(BoundReport("corr>=1/10", 2, skipped="target is not a nondegenerate symmetric unimodal law"))
    else:
        out.append(BoundReport("corr>=1/10", 2, Fraction(1, 10), corr, "weak", err, method="exact-oracle"))

    try:
        ez2 = _step_second_moment(step)
        simple = 1 - ez2 / var
        out.append(BoundReport("corr-simple", 2, simple, corr, "weak", err, method="step-second-moment"))
    except Exception as exc:  # noqa: BLE001 - a skipped informational bound
        out.append(BoundReport("corr-simple", 2, skipped=f"step second moment unavailable: {exc}"))
    return out


def check_linear_bound(spec: ChainSpec, c, r, m=0, tol=DEFAULT_TOL) -> list:
    """E|<c, X_1 - X_0>|^r <= 2^(r-1) E|<c, X_0> - m|^r for r >= 2; at r = 2 also
    Cov(<c, X_0>, <c, X_1>) > 0."""
    if r < 2:
        raise RangeError("the linear-functional bound needs r >= 2")
    res = incr_moment_linear(spec, c, r, tol)
    rhs = two_pow(r - 1) * spec.target.linear_abs_moment(c, r, m)
    ex = _all_exact(res.value, rhs)
    st = _strictness(spec)
    out = [BoundReport("incr-moment-linear", r, res.value, rhs, st, res.error + _err(res.value, rhs, exact=ex, tol=tol),
                       method=res.method)]
    if r == 2:
        if spec.space == "lattice":
            cm = (c,) if np.isscalar(c) else tuple(c)
            mean = spec.target.mean()
            mean = (mean,) if spec.dim == 1 else mean
            centre = sum(ci * mi for ci, mi in zip(cm, mean))
        else:
            mean = np.atleast_1d(np.asarray(spec.target.mean(), dtype=float))
            centre = float(np.dot(np.atleast_1d(np.asarray(c, dtype=float)), mean))
        var_c = spec.target.linear_abs_moment(c, 2, centre)
        cov = var_c - res.value / 2
        out.append(BoundReport("cov-linear>0", 2, 0, cov, st, res.error + _err(var_c, exact=ex, tol=tol),
                               method=res.method))
    return out


def winkler_check(Y: Distribution, y, r) -> BoundReport:
    """y^r P(|Y| > y) <= (r/(r+1))^r E|Y|^r for Y unimodal about 0.

    Equality holds exactly for mixtures of uniform laws on (0, L) and (-L, 0)
    with L = (r+1) y / r (plus an atom at 0, which densities cannot carry);
    the note field says whether Y is of that form.
    """
    if Y.space != "continuous" or Y.dim != 1:
        raise PreconditionFailed("needs a one-dimensional density")
    if not Y.is_unimodal_about(0):
        raise PreconditionFailed("Y must be unimodal about 0")
    if not y > 0 or not r > 0:
        raise RangeError("need y > 0 and r > 0")
    y, r = float(y), float(r)
    lhs = y**r * Y.tail(y)
    rhs = (r / (r + 1)) ** r * Y.abs_moment(r, 0)
    note = ""
    if isinstance(Y, UniformMixture):
        L = (r + 1) * y / r
        ok = all(
            (abs(float(a)) < 1e-12 and abs(float(b) - L) < 1e-12 * L) or (abs(float(b)) < 1e-12 and abs(float(a) + L) < 1e-12 * L)
            for _, a, b in Y.components
        )
        note = "equality-family" if ok else ""
    return BoundReport("tail-moment", r, lhs, rhs, "weak", _err(lhs, rhs), method="closed-form+quadrature", note=note)


def even_lag_report(chain, t_list) -> list:
    """tr Cov(X_0, X_t) >= 0 for even t on a reversible finite chain; at t = 2
    also the identity tr Cov(X_0, X_2) = tr Var(E[X_1 | X_0])."""
    require_reversible(chain)
    out = []
    for t in t_list:
        if t % 2:
            raise RangeError(f"lag {t} is odd")
        st = exact_lag_stats(chain, t, [])
        out.append(BoundReport("even-lag-cov>=0", 2, 0, st.trace_cov, "weak", st.error_bound, method="exact-oracle", lag=t))
        if t == 2:
            out.append(BoundReport("lag2-identity", 2, st.trace_cov, st.cond_mean_trace_var, "equal", st.error_bound,
                                   method="exact-oracle", lag=2))
    return out


@dataclass
class NormalRho:
    r: float
    rho: float
    rho_hat: float
    rho_tilde: float
    small_r_bound: float
    error: float = 0.0


def rho_hat(r):
    r = float(r)
    return (math.sqrt(2) * r / (r + 1)) ** r


def rho_tilde(r):
    r = float(r)
    return math.exp(math.lgamma(r / 2) - math.lgamma((r + 1) / 2)) / math.sqrt(math.pi)


def normal_increment_moment(r, proposal_sd=2.0, tol=DEFAULT_TOL):
    """E|X_1 - X_0|^r for a standard normal target and N(0, sd^2) steps.

    Uses E[|Z|^r P(|X_0| > |Z|/2)] with the normal tail in closed form,
    integrated over |Z| = sd * y in log space.
    """
    r, s = float(r), float(proposal_sd)
    logc = math.log(4.0) - 0.5 * math.log(2 * math.pi) + r * math.log(s)

    def f(y):
        if y <= 0:
            return 0.0
        return math.exp(logc + r * math.log(y) - y * y / 2 + float(special.log_ndtr(-s * y / 2)))

    peak = math.sqrt(max(r, 1e-3) / (1 + s * s / 4))
    hi = peak + 40.0
    return integrate_1d(f, 0.0, hi, [peak, 1.0], tol=tol)


def normal_example_rho(r, proposal_sd=2.0) -> NormalRho:
    """rho(r) = E|X_1 - X_0|^r / E|X_0' - X_0|^r with X_0' an independent copy,
    for a standard normal target, together with its bounds and approximation."""
    if not r > 0 or not proposal_sd > 0:
        raise RangeError("need r > 0 and sd > 0")
    num, err = normal_increment_moment(r, proposal_sd)
    r = float(r)
    # E|X_0' - X_0|^r with X_0' - X_0 ~ N(0, 2)
    log_den = r * math.log(2.0) + math.lgamma((r + 1) / 2) - 0.5 * math.log(math.pi)
    rho = num / math.exp(log_den)
    return NormalRho(r, rho, rho_hat(r), rho_tilde(r), 2 ** ((r - 2) / 2), err / math.exp(log_den))
