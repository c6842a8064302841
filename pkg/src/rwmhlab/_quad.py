"""Piecewise adaptive quadrature on top of QUADPACK."""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import ToleranceNotMet

DEFAULT_TOL = 1e-10


def _cuts(lo, hi, points):
    inner = sorted({float(p) for p in points if lo < p < hi and math.isfinite(p)})
    return [lo, *inner, hi]


def integrate_1d(f, lo, hi, points=(), tol=DEFAULT_TOL, check=True, limit=400):
    """Integrate f over [lo, hi], splitting at the kink points given.

    Returns (value, error_estimate). Raises ToleranceNotMet when the summed
    error estimate exceeds tol * max(1, |value|) and check is on.
    """
    if not hi > lo:
        return 0.0, 0.0
    edges = _cuts(lo, hi, points)
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            v, e = integrate.quad(f, a, b, epsabs=tol * 1e-2, epsrel=tol * 1e-2, limit=limit)
            total += v
            err += e
    if check and not err <= tol * max(1.0, abs(total)):
        raise ToleranceNotMet(f"quadrature error {err:.3g} above tolerance on [{lo}, {hi}]")
    return total, err


def kink_points(breaks, shifts=(0.0,)):
    return sorted({float(b) + float(s) for b in breaks for s in shifts})


def finite_box(lo, hi):
    return bool(np.isfinite(lo) and np.isfinite(hi))
