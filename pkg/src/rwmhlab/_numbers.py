"""Helpers for mixing exact rationals and floats."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational


def is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


def parse_number(x, exact: bool = False):
    """Turn JSON-ish input into int, Fraction or float.

    Strings like "9/5" or "0.25" become Fractions. Floats stay floats unless
    `exact` is set, in which case their decimal repr is read as a Fraction.
    """
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, float):
        return Fraction(repr(x)) if exact else x
    if isinstance(x, str):
        s = x.strip()
        if s.lower() in ("inf", "+inf", "infinity"):
            return math.inf
        return Fraction(s)
    raise TypeError(f"cannot read {x!r} as a number")


def integer_exponent(r):
    """Return r as an int when it is integral, else None."""
    if isinstance(r, bool):
        return None
    if isinstance(r, int):
        return r
    if isinstance(r, Fraction):
        return int(r) if r.denominator == 1 else None
    if isinstance(r, float) and r.is_integer():
        return int(r)
    return None


def abs_pow(x, r):
    """|x|**r, exact when x is rational and r integral. 0**0 is 1."""
    k = integer_exponent(r)
    if is_exact(x) and k is not None and k >= 0:
        return Fraction(abs(x)) ** k
    x = abs(float(x))
    if x == 0.0:
        return 1.0 if float(r) == 0.0 else 0.0
    return x ** float(r)


def sq_norm(v):
    return sum(a * a for a in v)


def norm_pow(v, r):
    """||v||**r for a tuple of coordinates, exact for even integral r."""
    if len(v) == 1:
        return abs_pow(v[0], r)
    k = integer_exponent(r)
    s = sq_norm(v)
    if all(is_exact(a) for a in v) and k is not None and k >= 0 and k % 2 == 0:
        return Fraction(s) ** (k // 2)
    s = float(s)
    if s == 0.0:
        return 1.0 if float(r) == 0.0 else 0.0
    return s ** (float(r) / 2)


def two_pow(e):
    """2**e, exact for integral e."""
    k = integer_exponent(e)
    if k is not None:
        return Fraction(2) ** k
    return 2.0 ** float(e)


def to_float(x) -> float:
    return float(x)


def fmt_number(x) -> str:
    """Deterministic text form: p/q for rationals, repr for floats."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return repr(x)
