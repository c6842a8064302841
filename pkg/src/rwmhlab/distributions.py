"""Target and proposal-step distributions.

Every distribution is an immutable object with a `space` ("continuous" or
"lattice"), a dimension and a `kind` label. Targets and random-walk proposal
steps share the same classes; a proposal is just the law of the step Z.

Lattice laws keep their masses exactly as given, so rational inputs
(`fractions.Fraction`) stay rational through every downstream sum.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special, stats

from ._numbers import abs_pow, is_exact, norm_pow, parse_number
from ._quad import DEFAULT_TOL, integrate_1d
from .errors import (
    DimensionMismatch,
    MassError,
    NonIntegrable,
    NotSymmetric,
    PreconditionFailed,
    UnsupportedQuery,
    UnsupportedSampler,
)

MASS_TOL = 1e-12


def _gauss_halfwidth(r=2.0) -> float:
    # wide enough that the neglected mass of |x|^r pi(x) is far below 1e-12
    return 9.0 + 2.0 * math.sqrt(max(float(r), 0.0))


class Distribution:
    space = "continuous"
    kind = "distribution"
    dim = 1

    # flags; subclasses override with real checks
    @property
    def symmetric(self) -> bool:
        return False

    @property
    def unimodal(self) -> bool:
        return self.mode is not None

    @property
    def star_unimodal(self) -> bool:
        return False

    @property
    def mode(self):
        return None

    def is_unimodal_about(self, m) -> bool:
        return False

    def mean(self):
        raise UnsupportedQuery(f"mean not available for {self.kind}")

    def trace_var(self):
        raise UnsupportedQuery(f"variance not available for {self.kind}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise UnsupportedSampler(f"no sampler for {self.kind}")

    def abs_moment(self, r, m=0):
        raise UnsupportedQuery(f"absolute moment not available for {self.kind}")

    def linear_abs_moment(self, c, r, m=0):
        raise UnsupportedQuery(f"linear moment not available for {self.kind}")

    def __repr__(self):
        return f"<{self.kind} d={self.dim}>"


# ---------------------------------------------------------------- continuous


class Continuous1D(Distribution):
    """Base for densities on the real line."""

    space = "continuous"
    dim = 1

    def pdf(self, x):
        raise NotImplementedError

    def breakpoints(self) -> list[float]:
        return []

    def box(self, r=2.0) -> tuple[float, float]:
        """Integration range outside which the mass is negligible."""
        raise NotImplementedError

    def log_ratio_crossing(self, z, logc):
        """Point x with log pi(x) - log pi(x - z) = logc, if known in closed form."""
        return None

    def scalar_log_density(self) -> Callable[[float], float]:
        def f(x):
            v = float(self.pdf(x))
            return math.log(v) if v > 0 else -math.inf

        return f

    def expect(self, func, points=(), tol=DEFAULT_TOL, r=2.0):
        """E[func(X)] by quadrature, splitting at the density's kinks."""
        lo, hi = self.box(r)
        pts = list(self.breakpoints()) + list(points)
        val, _ = integrate_1d(lambda x: func(x) * float(self.pdf(x)), lo, hi, pts, tol=tol)
        return val

    def tail(self, t) -> float:
        """P(|X| > t)."""
        t = abs(float(t))
        lo, hi = self.box(0.0)
        left, _ = integrate_1d(lambda x: float(self.pdf(x)), lo, -t, self.breakpoints())
        right, _ = integrate_1d(lambda x: float(self.pdf(x)), t, hi, self.breakpoints())
        return left + right

    def abs_moment(self, r, m=0, tol=DEFAULT_TOL):
        m = float(m)
        r = float(r)
        return self.expect(lambda x: abs(x - m) ** r if x != m else (1.0 if r == 0 else 0.0), [m], tol=tol, r=r)

    def linear_abs_moment(self, c, r, m=0):
        c = float(np.atleast_1d(np.asarray(c, dtype=float))[0])
        if c == 0.0:
            return abs_pow(float(m), r)
        return abs(c) ** float(r) * self.abs_moment(r, float(m) / c)

    def mean(self):
        return self.expect(lambda x: x)

    def trace_var(self):
        mu = self.mean()
        return self.expect(lambda x: (x - mu) ** 2, [mu])

    def _grid(self):
        lo, hi = self.box(0.0)
        pts = np.linspace(lo, hi, 2001)
        br = np.asarray(self.breakpoints(), dtype=float)
        mids = []
        if br.size:
            e = np.sort(np.concatenate([br, [lo, hi]]))
            mids = (e[:-1] + e[1:]) / 2
        return np.unique(np.concatenate([pts, mids]))

    @property
    def symmetric(self) -> bool:
        x = self._grid()
        a = np.asarray(self.pdf(x), dtype=float)
        b = np.asarray(self.pdf(-x), dtype=float)
        return bool(np.all(np.abs(a - b) <= 1e-12 * (1 + np.abs(a))))

    def is_unimodal_about(self, m) -> bool:
        x = self._grid()
        f = np.asarray(self.pdf(x), dtype=float)
        slack = 1e-12 * (1 + f.max())
        left = f[x <= m]
        right = f[x >= m]
        return bool(np.all(np.diff(left) >= -slack) and np.all(np.diff(right) <= slack))


class Gaussian(Distribution):
    """Gaussian with diagonal covariance; d = len(mean)."""

    kind = "gaussian"

    def __init__(self, mean=0.0, var=1.0, kind=None):
        mean_t = tuple(float(v) for v in np.atleast_1d(np.asarray(mean, dtype=float)))
        var_t = tuple(float(v) for v in np.atleast_1d(np.asarray(var, dtype=float)))
        if len(var_t) == 1 and len(mean_t) > 1:
            var_t = var_t * len(mean_t)
        if len(mean_t) == 1 and len(var_t) > 1:
            mean_t = mean_t * len(var_t)
        if len(mean_t) != len(var_t):
            raise DimensionMismatch("mean and variance lengths differ")
        if any(v <= 0 for v in var_t):
            raise ValueError("variances must be positive")
        self.mean_vec = mean_t
        self.var_vec = var_t
        self.dim = len(mean_t)
        if kind:
            self.kind = kind

    @property
    def mu(self) -> float:
        return self.mean_vec[0]

    @property
    def sd(self) -> float:
        return math.sqrt(self.var_vec[0])

    @property
    def isotropic(self) -> bool:
        return len(set(self.var_vec)) == 1

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return np.exp(-((x - self.mu) ** 2) / (2 * self.var_vec[0])) / math.sqrt(2 * math.pi * self.var_vec[0])
        mu = np.asarray(self.mean_vec)
        var = np.asarray(self.var_vec)
        q = (((x - mu) ** 2) / var).sum(axis=-1)
        return np.exp(-q / 2) / math.sqrt((2 * math.pi) ** self.dim * float(np.prod(var)))

    def log_pdf_unnormalized(self, x):
        x = np.asarray(x, dtype=float)
        return -0.5 * (((x - np.asarray(self.mean_vec)) ** 2) / np.asarray(self.var_vec)).sum(axis=-1)

    def scalar_log_density(self):
        mu, v = self.mu, self.var_vec[0]
        return lambda x: -((x - mu) ** 2) / (2 * v)

    def breakpoints(self):
        return [self.mu]

    def box(self, r=2.0):
        h = _gauss_halfwidth(r) * self.sd
        return self.mu - h, self.mu + h

    def log_ratio_crossing(self, z, logc):
        if z == 0:
            return None
        return self.mu + z / 2 - self.var_vec[0] * logc / z

    def expect(self, func, points=(), tol=DEFAULT_TOL, r=2.0):
        return Continuous1D.expect(self, func, points, tol, r)

    def tail(self, t):
        self._need_1d()
        t = abs(float(t))
        return float(special.ndtr((-t - self.mu) / self.sd) + special.ndtr((self.mu - t) / self.sd))

    def first_coordinate_tail(self, t):
        t = abs(float(t))
        mu, sd = self.mean_vec[0], math.sqrt(self.var_vec[0])
        return float(special.ndtr((-t - mu) / sd) + special.ndtr((mu - t) / sd))

    def abs_moment(self, r, m=0, tol=DEFAULT_TOL):
        if self.dim == 1:
            return Continuous1D.abs_moment(self, r, m, tol)
        m = np.broadcast_to(np.asarray(m, dtype=float), (self.dim,))
        if float(r) == 2.0:
            return float(sum(v + (mu - mm) ** 2 for v, mu, mm in zip(self.var_vec, self.mean_vec, m)))
        if self.isotropic and np.allclose(m, self.mean_vec, rtol=0, atol=0):
            s = math.sqrt(self.var_vec[0])
            r = float(r)
            return s**r * 2 ** (r / 2) * math.exp(math.lgamma((self.dim + r) / 2) - math.lgamma(self.dim / 2))
        raise UnsupportedQuery("general-r moments of a non-isotropic or off-center Gaussian in d > 1")

    def projection(self, c) -> "Gaussian":
        c = np.asarray(c, dtype=float).reshape(-1)
        if c.size != self.dim:
            raise DimensionMismatch("c has the wrong length")
        return Gaussian(float(c @ np.asarray(self.mean_vec)), float((c**2) @ np.asarray(self.var_vec)))

    def linear_abs_moment(self, c, r, m=0):
        p = self.projection(c)
        return p.abs_moment(r, m)

    def mean(self):
        return self.mean_vec[0] if self.dim == 1 else np.asarray(self.mean_vec)

    def trace_var(self):
        return float(sum(self.var_vec))

    def sample(self, rng, size):
        z = rng.standard_normal((size, self.dim))
        return np.asarray(self.mean_vec) + z * np.sqrt(np.asarray(self.var_vec))

    def norm_expect(self, func, tol=DEFAULT_TOL):
        """E[func(||X||)] for a centered isotropic Gaussian."""
        if not (self.isotropic and all(v == 0 for v in self.mean_vec)):
            raise UnsupportedQuery("norm law needs a centered isotropic Gaussian")
        s = math.sqrt(self.var_vec[0])
        d = self.dim
        hi = s * (math.sqrt(d) + _gauss_halfwidth(2))
        val, _ = integrate_1d(lambda t: func(t) * stats.chi.pdf(t / s, d) / s, 0.0, hi, tol=tol)
        return val

    @property
    def symmetric(self):
        return all(v == 0 for v in self.mean_vec)

    @property
    def mode(self):
        return self.mu if self.dim == 1 else self.mean_vec

    def is_unimodal_about(self, m):
        return self.dim == 1 and float(m) == self.mu

    @property
    def star_unimodal(self):
        return self.symmetric and self.isotropic

    def _need_1d(self):
        if self.dim != 1:
            raise DimensionMismatch("operation needs d = 1")

    def __repr__(self):
        return f"<{self.kind} mean={self.mean_vec} var={self.var_vec}>"


def _uniform_abs_moment(a, b, r, m):
    """E|U - m|^r for U uniform on (a, b)."""
    a, b, m, r = float(a), float(b), float(m), float(r)

    def prim(x):  # antiderivative of |x - m|^r
        u = x - m
        return math.copysign(abs(u) ** (r + 1), u) / (r + 1)

    return (prim(b) - prim(a)) / (b - a)


class UniformMixture(Continuous1D):
    """Finite mixture of uniform laws on intervals: components (weight, a, b)."""

    kind = "uniform-mixture"

    def __init__(self, components, kind=None):
        comps = []
        for w, a, b in components:
            w = parse_number(w) if isinstance(w, str) else w
            if not b > a:
                raise ValueError("each interval needs a < b")
            if w < 0:
                raise MassError("negative mixture weight")
            if w > 0:
                comps.append((w, a, b))
        total = sum(w for w, _, _ in comps)
        if abs(float(total) - 1.0) > MASS_TOL:
            raise MassError(f"mixture weights sum to {float(total)}")
        self.components = tuple(comps)
        if kind:
            self.kind = kind

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, a, b in self.components:
            out = out + float(w) / float(b - a) * ((x > a) & (x < b))
        return out

    def scalar_log_density(self):
        comps = [(float(w) / float(b - a), float(a), float(b)) for w, a, b in self.components]

        def f(x):
            v = 0.0
            for h, a, b in comps:
                if a < x < b:
                    v += h
            return math.log(v) if v > 0 else -math.inf

        return f

    def breakpoints(self):
        return sorted({float(a) for _, a, _ in self.components} | {float(b) for _, _, b in self.components})

    def box(self, r=2.0):
        br = self.breakpoints()
        return br[0], br[-1]

    def tail(self, t):
        t = abs(float(t))
        out = 0.0
        for w, a, b in self.components:
            a, b = float(a), float(b)
            inside = max(0.0, min(b, t) - max(a, -t))
            out += float(w) * (1.0 - inside / (b - a))
        return out

    def abs_moment(self, r, m=0, tol=DEFAULT_TOL):
        return sum(float(w) * _uniform_abs_moment(a, b, r, m) for w, a, b in self.components)

    def mean(self):
        return sum(float(w) * (float(a) + float(b)) / 2 for w, a, b in self.components)

    def trace_var(self):
        mu = self.mean()
        return self.abs_moment(2, mu)

    def sample(self, rng, size):
        w = np.array([float(c[0]) for c in self.components])
        idx = rng.choice(len(w), size=size, p=w / w.sum())
        a = np.array([float(c[1]) for c in self.components])[idx]
        b = np.array([float(c[2]) for c in self.components])[idx]
        return (a + (b - a) * rng.random(size)).reshape(size, 1)

    def _levels(self):
        br = self.breakpoints()
        mids = [(x + y) / 2 for x, y in zip(br[:-1], br[1:])]
        return br, mids, [float(self.pdf(x)) for x in mids]

    @property
    def symmetric(self):
        br = sorted(set(self.breakpoints()) | {-b for b in self.breakpoints()})
        mids = [(x + y) / 2 for x, y in zip(br[:-1], br[1:])]
        return all(abs(float(self.pdf(x)) - float(self.pdf(-x))) <= 1e-12 for x in mids)

    def is_unimodal_about(self, m):
        br, mids, lev = self._levels()
        m = float(m)
        # the zero density outside the support extends the profile on both ends
        # an interval straddling m belongs to both sides
        spans = list(zip(br[:-1], br[1:], lev))
        left = [0.0] + [v for x, y, v in spans if x < m]
        right = [v for x, y, v in spans if y > m] + [0.0]
        ok_l = all(b >= a - 1e-15 for a, b in zip(left[:-1], left[1:]))
        ok_r = all(b <= a + 1e-15 for a, b in zip(right[:-1], right[1:]))
        return ok_l and ok_r

    @property
    def mode(self):
        br, mids, lev = self._levels()
        top = max(lev)
        for m in [0.0, *[x for x, v in zip(mids, lev) if v == top], *br]:
            if self.is_unimodal_about(m):
                return m
        return None


class UniformInterval(UniformMixture):
    kind = "uniform-interval"

    def __init__(self, a, b, kind=None):
        super().__init__([(1, a, b)], kind=kind)
        self.a = a
        self.b = b

    def is_unimodal_about(self, m):
        return float(self.a) <= float(m) <= float(self.b)

    @property
    def mode(self):
        if self.is_unimodal_about(0):
            return 0.0
        return (float(self.a) + float(self.b)) / 2

    @property
    def symmetric(self):
        return self.a == -self.b

    def __repr__(self):
        return f"<{self.kind} ({self.a}, {self.b})>"


class Symmetrized(Continuous1D):
    """x -> (pi(x) + pi(-x)) / 2 for a generic 1-d density."""

    def __init__(self, base: Continuous1D):
        self.base = base
        self.kind = f"symmetrized-{base.kind}"

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 0.5 * (np.asarray(self.base.pdf(x)) + np.asarray(self.base.pdf(-x)))

    def breakpoints(self):
        b = self.base.breakpoints()
        return sorted(set(b) | {-v for v in b})

    def box(self, r=2.0):
        lo, hi = self.base.box(r)
        h = max(abs(lo), abs(hi))
        return -h, h

    def tail(self, t):
        return self.base.tail(t)

    def abs_moment(self, r, m=0, tol=DEFAULT_TOL):
        return 0.5 * (self.base.abs_moment(r, m, tol) + self.base.abs_moment(r, -float(m), tol))

    def mean(self):
        return 0.0

    def sample(self, rng, size):
        x = self.base.sample(rng, size)
        sign = np.where(rng.random((size, 1)) < 0.5, -1.0, 1.0)
        return x * sign

    @property
    def symmetric(self):
        return True

    @property
    def mode(self):
        return 0.0 if self.is_unimodal_about(0.0) else None


class SphericalStarUnimodal(Distribution):
    """Radially nonincreasing density on R^d, piecewise constant in the radius.

    `radii` are increasing outer radii R_1 < ... < R_J and `heights` the
    profile values on the shells [R_{j-1}, R_j). Heights are rescaled to unit
    mass. Internally the law is a mixture of uniform balls.
    """

    kind = "spherical-star-unimodal"

    def __init__(self, radii, heights, dim=1):
        radii = [float(x) for x in radii]
        heights = [float(h) for h in heights]
        if len(radii) != len(heights) or not radii:
            raise ValueError("radii and heights must have equal nonzero length")
        if any(b <= a for a, b in zip(radii[:-1], radii[1:])) or radii[0] <= 0:
            raise ValueError("radii must be positive and increasing")
        if any(h < 0 for h in heights) or any(b > a for a, b in zip(heights[:-1], heights[1:])):
            raise PreconditionFailed("radial profile must be nonnegative and nonincreasing")
        self.dim = int(dim)
        vol = [self._ball_volume(R) for R in radii]
        shells = [v - (vol[i - 1] if i else 0.0) for i, v in enumerate(vol)]
        mass = sum(h * s for h, s in zip(heights, shells))
        if mass <= 0:
            raise MassError("profile has zero mass")
        heights = [h / mass for h in heights]
        nxt = heights[1:] + [0.0]
        ws = [(h - n) * v for h, n, v in zip(heights, nxt, vol)]
        self.radii = tuple(radii)
        self.heights = tuple(heights)
        self.balls = tuple((w, R) for w, R in zip(ws, radii) if w > 0)

    def _ball_volume(self, R):
        d = self.dim
        return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * R**d

    def profile(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for w, R in self.balls:
            out = out + (w / self._ball_volume(R)) * (rho < R)
        return out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return self.profile(np.abs(x))
        return self.profile(np.sqrt((x**2).sum(axis=-1)))

    def scalar_log_density(self):
        f = lambda x: float(self.profile(abs(x)))
        return lambda x: math.log(f(x)) if f(x) > 0 else -math.inf

    def breakpoints(self):
        return sorted({-R for R in self.radii} | {R for R in self.radii})

    def box(self, r=2.0):
        return -self.radii[-1], self.radii[-1]

    def first_coordinate_tail(self, t):
        """P(|X_1| > t) where X_1 is one coordinate."""
        t = abs(float(t))
        d = self.dim
        out = 0.0
        for w, R in self.balls:
            if t >= R:
                continue
            u = (t / R + 1) / 2
            out += w * 2 * stats.beta.sf(u, (d + 1) / 2, (d + 1) / 2)
        return float(out)

    def tail(self, t):
        if self.dim != 1:
            raise DimensionMismatch("tail probability needs d = 1")
        return self.first_coordinate_tail(t)

    def expect(self, func, points=(), tol=DEFAULT_TOL, r=2.0):
        if self.dim != 1:
            raise DimensionMismatch("expect needs d = 1")
        pts = self.breakpoints() + list(points)
        lo, hi = self.box()
        v, _ = integrate_1d(lambda x: func(x) * float(self.pdf(x)), lo, hi, pts, tol=tol)
        return v

    def abs_moment(self, r, m=0, tol=DEFAULT_TOL):
        if np.any(np.asarray(m, dtype=float) != 0):
            if self.dim == 1:
                return sum(w * _uniform_abs_moment(-R, R, r, m) for w, R in self.balls)
            raise UnsupportedQuery("off-center moments of a spherical law in d > 1")
        r = float(r)
        d = self.dim
        return float(sum(w * R**r * d / (d + r) for w, R in self.balls))

    def linear_abs_moment(self, c, r, m=0):
        c = np.asarray(c, dtype=float).reshape(-1)
        if c.size != self.dim:
            raise DimensionMismatch("c has the wrong length")
        cn = float(np.linalg.norm(c))
        if self.dim == 1:
            return cn ** float(r) * self.abs_moment(r, float(m) / cn) if cn else abs_pow(float(m), r)
        d, r, m = self.dim, float(r), float(m)
        # one coordinate of a uniform ball of radius R has density
        # proportional to (1 - t^2/R^2)^((d-1)/2) on (-R, R)
        out = 0.0
        for w, R in self.balls:
            dens = stats.beta((d + 1) / 2, (d + 1) / 2, loc=-R, scale=2 * R)
            v, _ = integrate_1d(lambda t: abs(cn * t - m) ** r * dens.pdf(t), -R, R, [m / cn if cn else 0.0])
            out += w * v
        return out

    def mean(self):
        return 0.0 if self.dim == 1 else np.zeros(self.dim)

    def trace_var(self):
        return self.abs_moment(2, 0)

    def sample(self, rng, size):
        w = np.array([b[0] for b in self.balls])
        R = np.array([b[1] for b in self.balls])[rng.choice(len(w), size=size, p=w / w.sum())]
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        rad = R * rng.random(size) ** (1.0 / self.dim)
        return g * rad[:, None]

    @property
    def symmetric(self):
        return True

    @property
    def star_unimodal(self):
        return True

    @property
    def mode(self):
        return 0.0 if self.dim == 1 else np.zeros(self.dim)

    def is_unimodal_about(self, m):
        return self.dim == 1 and float(m) == 0.0


class CustomDensity(Continuous1D):
    """User-supplied density on an interval of the real line.

    `tail_exponent` p declares pi(x) = O(|x|^-p) at infinity, so that
    r-th absolute moments exist only for r < p - 1. None means the tails are
    light enough for every moment.
    """

    kind = "custom-density"

    def __init__(self, density, support=(-math.inf, math.inf), tail_exponent=None, sampler=None,
                 breakpoints=(), mode=None, symmetric=False, box=None):
        self.density = density
        self.support = (float(support[0]), float(support[1]))
        self.tail_exponent = tail_exponent
        self.sampler = sampler
        self._breaks = [float(b) for b in breakpoints]
        self._mode = mode
        self._symmetric = symmetric
        self._box = box

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        v = np.vectorize(lambda t: float(self.density(t)) if lo <= t <= hi else 0.0, otypes=[float])(x)
        return v if v.ndim else float(v)

    def breakpoints(self):
        return self._breaks + [v for v in self.support if math.isfinite(v)]

    def box(self, r=2.0):
        return self._box if self._box is not None else self.support

    def check_moment(self, r):
        if self.tail_exponent is not None and float(r) >= self.tail_exponent - 1:
            raise NonIntegrable(f"E|X|^{r} diverges for tail exponent {self.tail_exponent}")

    def abs_moment(self, r, m=0, tol=DEFAULT_TOL):
        self.check_moment(r)
        return super().abs_moment(r, m, tol)

    def mean(self):
        self.check_moment(1)
        return super().mean()

    def trace_var(self):
        self.check_moment(2)
        return super().trace_var()

    def sample(self, rng, size):
        if self.sampler is None:
            raise UnsupportedSampler("custom density has no sampler")
        return np.asarray(self.sampler(rng, size), dtype=float).reshape(size, 1)

    @property
    def symmetric(self):
        return bool(self._symmetric)

    @property
    def mode(self):
        return self._mode

    def is_unimodal_about(self, m):
        return self._mode is not None and float(m) == float(self._mode)


class AxisSteps(Distribution):
    """Continuous steps along coordinate axes: entries (axis, 1-d law, weight)."""

    kind = "axis-steps"

    def __init__(self, components, dim):
        self.dim = int(dim)
        comps = []
        for axis, law, w in components:
            if not 0 <= axis < self.dim:
                raise DimensionMismatch("axis index out of range")
            if getattr(law, "dim", 1) != 1 or law.space != "continuous":
                raise DimensionMismatch("axis step laws must be 1-d continuous")
            comps.append((int(axis), law, float(w)))
        total = sum(w for _, _, w in comps)
        if abs(total - 1.0) > MASS_TOL:
            raise MassError("axis step weights must sum to 1")
        self.components = tuple(comps)

    def sample(self, rng, size):
        w = np.array([c[2] for c in self.components])
        idx = rng.choice(len(w), size=size, p=w)
        out = np.zeros((size, self.dim))
        for j, (axis, law, _) in enumerate(self.components):
            sel = np.nonzero(idx == j)[0]
            if sel.size:
                out[sel, axis] = law.sample(rng, sel.size)[:, 0]
        return out

    def norm_expect(self, func, tol=DEFAULT_TOL):
        return sum(w * law.expect(lambda z: func(abs(z)), [0.0], tol=tol) for _, law, w in self.components)

    def log_density_ratio(self, z):
        """log phi(-z) - log phi(z) for an axis-aligned step z."""
        z = np.asarray(z, dtype=float)
        nz = np.nonzero(z)[0]
        if nz.size != 1:
            return 0.0
        axis = int(nz[0])
        t = float(z[axis])
        num = sum(w * float(law.pdf(-t)) for a, law, w in self.components if a == axis)
        den = sum(w * float(law.pdf(t)) for a, law, w in self.components if a == axis)
        if num == 0:
            return -math.inf
        return math.log(num) - math.log(den)

    @property
    def symmetric(self):
        return all(law.symmetric for _, law, _ in self.components)


# ------------------------------------------------------------------- lattice


def _as_point(p, dim=None):
    if isinstance(p, (int, np.integer)):
        t = (int(p),)
    else:
        t = tuple(int(v) for v in p)
    if dim is not None and len(t) != dim:
        raise DimensionMismatch(f"point {p} is not in Z^{dim}")
    return t


class LatticePMF(Distribution):
    """Finitely supported law on Z^d, keyed by integer tuples."""

    space = "lattice"
    kind = "lattice-pmf"

    def __init__(self, masses, dim=None, kind=None, normalized=True):
        items = []
        for p, w in dict(masses).items():
            w = parse_number(w) if isinstance(w, str) else w
            if w < 0:
                raise MassError(f"negative mass at {p}")
            items.append((p, w))
        if dim is None:
            first = items[0][0] if items else 0
            dim = 1 if isinstance(first, (int, np.integer)) else len(first)
        self.dim = int(dim)
        acc: dict = {}
        for p, w in items:
            q = _as_point(p, self.dim)
            acc[q] = acc.get(q, 0) + w
        self.masses = {p: w for p, w in sorted(acc.items()) if w != 0}
        total = sum(self.masses.values())
        if normalized:
            if is_exact(total) and total != 1:
                raise MassError(f"masses sum to {total}")
            if not is_exact(total) and abs(float(total) - 1.0) > MASS_TOL:
                raise MassError(f"masses sum to {float(total)}")
        if kind:
            self.kind = kind

    @property
    def exact(self) -> bool:
        return all(is_exact(w) for w in self.masses.values())

    @property
    def points(self):
        return list(self.masses)

    def pmf(self, p):
        return self.masses.get(_as_point(p, self.dim), 0)

    def as_dict(self):
        if self.dim == 1:
            return {p[0]: w for p, w in self.masses.items()}
        return dict(self.masses)

    def tail(self, t):
        if self.dim != 1:
            raise DimensionMismatch("tail probability needs d = 1")
        return sum((w for p, w in self.masses.items() if abs(p[0]) > t), 0)

    def first_coordinate_tail(self, t):
        return sum((w for p, w in self.masses.items() if abs(p[0]) > t), 0)

    def coordinate_tail(self, i, t):
        return sum((w for p, w in self.masses.items() if abs(p[i]) > t), 0)

    def _center(self, m):
        if m is None:
            return tuple([0] * self.dim)
        if isinstance(m, (int, float, Fraction, np.integer, np.floating)):
            return tuple([m] * self.dim) if self.dim > 1 else (m,)
        return tuple(m)

    def abs_moment(self, r, m=0):
        m = self._center(m)
        return sum((w * norm_pow(tuple(a - b for a, b in zip(p, m)), r) for p, w in self.masses.items()), 0)

    def linear_abs_moment(self, c, r, m=0):
        c = tuple(c) if not isinstance(c, (int, float, Fraction)) else (c,)
        if len(c) != self.dim:
            raise DimensionMismatch("c has the wrong length")
        return sum((w * abs_pow(sum(ci * xi for ci, xi in zip(c, p)) - m, r) for p, w in self.masses.items()), 0)

    def mean(self):
        if self.dim == 1:
            return sum((w * p[0] for p, w in self.masses.items()), 0)
        return tuple(sum((w * p[i] for p, w in self.masses.items()), 0) for i in range(self.dim))

    def trace_var(self):
        mu = self.mean()
        return self.abs_moment(2, mu)

    def sample(self, rng, size):
        pts = np.array(self.points, dtype=np.int64)
        w = np.array([float(v) for v in self.masses.values()])
        idx = rng.choice(len(pts), size=size, p=w / w.sum())
        return pts[idx]

    @property
    def symmetric(self):
        return all(self.masses.get(tuple(-v for v in p), 0) == w for p, w in self.masses.items())

    @property
    def odd_support(self) -> bool:
        """Every support point is an odd multiple of a coordinate vector."""
        for p in self.masses:
            nz = [v for v in p if v != 0]
            if len(nz) != 1 or nz[0] % 2 == 0:
                return False
        return True

    def is_unimodal_about(self, m) -> bool:
        if self.dim != 1:
            return False
        xs = [p[0] for p in self.masses]
        lo, hi = min(xs), max(xs)
        lo, hi = min(lo, math.floor(m)), max(hi, math.ceil(m))
        f = [self.pmf(x) for x in range(lo, hi + 1)]
        grid = list(range(lo, hi + 1))
        left = [v for x, v in zip(grid, f) if x <= m]
        right = [v for x, v in zip(grid, f) if x >= m]
        return all(b >= a for a, b in zip(left[:-1], left[1:])) and all(b <= a for a, b in zip(right[:-1], right[1:]))

    @property
    def mode(self):
        if self.dim != 1:
            return None
        top = max(self.masses.values())
        for p, w in self.masses.items():
            if w == top and self.is_unimodal_about(p[0]):
                return 0 if self.is_unimodal_about(0) else p[0]
        return None

    def radial_profile(self):
        """Map ||x||^2 -> mass if the pmf depends on x only through ||x||, else None."""
        prof: dict = {}
        for p, w in self.masses.items():
            s = sum(v * v for v in p)
            if prof.setdefault(s, w) != w:
                return None
        return prof

    @property
    def star_unimodal(self):
        prof = self.radial_profile()
        if prof is None or any(sum(v * v for v in p) == 0 for p in []):
            return False
        # every lattice point inside the largest occupied radius must carry
        # at least the mass of any point farther out
        rmax = max(prof)
        k = math.isqrt(rmax)
        levels = []
        for pt in np.ndindex(*([2 * k + 1] * self.dim)):
            q = tuple(v - k for v in pt)
            s = sum(v * v for v in q)
            if s <= rmax:
                levels.append((s, self.masses.get(q, 0)))
        levels.sort(key=lambda t: t[0])
        for (s1, w1), (s2, w2) in zip(levels[:-1], levels[1:]):
            if s2 > s1 and w2 > w1:
                return False
            if s2 == s1 and w2 != w1:
                return False
        return True

    def __repr__(self):
        return f"<{self.kind} {self.as_dict()}>"


# -------------------------------------------------------------- constructors


def gaussian(mean=0.0, var=1.0) -> Gaussian:
    return Gaussian(mean, var)


def uniform_interval(a, b) -> UniformInterval:
    return UniformInterval(a, b)


def uniform_mixture(components) -> UniformMixture:
    return UniformMixture(components)


def spherical_star_unimodal(radii, heights, dim=1) -> SphericalStarUnimodal:
    return SphericalStarUnimodal(radii, heights, dim)


def lattice_pmf(masses, dim=None) -> LatticePMF:
    return LatticePMF(masses, dim)


def bernoulli(p) -> LatticePMF:
    p = parse_number(p) if isinstance(p, str) else p
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    return LatticePMF({0: 1 - p, 1: p}, kind="bernoulli")


def lattice_uniform(k: int) -> LatticePMF:
    """Uniform law on {-k, ..., k}."""
    n = 2 * k + 1
    return LatticePMF({x: Fraction(1, n) for x in range(-k, k + 1)}, kind="lattice-uniform")


def lattice_uniform_on(points) -> LatticePMF:
    pts = list(points)
    return LatticePMF({p: Fraction(1, len(pts)) for p in pts}, kind="lattice-uniform")


def custom_density(density, support=(-math.inf, math.inf), **kw) -> CustomDensity:
    return CustomDensity(density, support, **kw)


def gaussian_step(var=1.0, dim=1) -> Gaussian:
    var = np.broadcast_to(np.asarray(var, dtype=float), (dim,))
    return Gaussian(np.zeros(dim), var, kind="gaussian-step")


def uniform_step(a, b=None) -> UniformInterval:
    """Step uniform on (a, b); with one argument, on (-a, a)."""
    if b is None:
        a, b = -a, a
    return UniformInterval(a, b, kind="uniform-step")


def two_sided_uniform_mixture(center, eps) -> UniformMixture:
    """Step uniform on (c - eps, c + eps) or its mirror image, each with weight 1/2."""
    if not 0 < eps <= center:
        raise ValueError("need 0 < eps <= center")
    h = Fraction(1, 2)
    return UniformMixture([(h, center - eps, center + eps), (h, -center - eps, -center + eps)],
                          kind="two-sided-uniform-mixture")


def lattice_step(masses, dim=None) -> LatticePMF:
    return LatticePMF(masses, dim, kind="lattice-step-pmf")


def axis_odd_steps(entries, dim) -> LatticePMF:
    """Steps (axis, odd offset, weight): offset * e_axis with that weight."""
    acc: dict = {}
    for axis, off, w in entries:
        if off % 2 == 0:
            raise PreconditionFailed(f"offset {off} is not odd")
        p = [0] * dim
        p[axis] = int(off)
        acc[tuple(p)] = acc.get(tuple(p), 0) + w
    return LatticePMF(acc, dim, kind="axis-odd-steps")


def axis_steps(components, dim) -> AxisSteps:
    return AxisSteps(components, dim)


# --------------------------------------------------------------- operations


def absolute_moment(target: Distribution, r, m=None):
    """E||X - m||^r, exact for rational lattice laws and integral r."""
    if float(r) < 0:
        raise ValueError("r must be nonnegative")
    if m is None:
        m = target.mean()
    return target.abs_moment(r, m)


def tail_probability(target: Distribution, t):
    if target.dim != 1:
        raise DimensionMismatch("tail probability needs d = 1")
    return target.tail(t)


def symmetrize(dist: Distribution) -> Distribution:
    """x -> (p(x) + p(-x)) / 2; symmetric inputs come back unchanged."""
    if dist.symmetric:
        return dist
    if isinstance(dist, LatticePMF):
        acc: dict = {}
        half = Fraction(1, 2) if dist.exact else 0.5
        for p, w in dist.masses.items():
            for q in (p, tuple(-v for v in p)):
                acc[q] = acc.get(q, 0) + half * w
        return LatticePMF(acc, dist.dim, kind=dist.kind)
    if isinstance(dist, UniformMixture):
        comps = []
        for w, a, b in dist.components:
            hw = w / 2 if is_exact(w) else w / 2.0
            comps += [(hw, a, b), (hw, -b, -a)]
        return UniformMixture(comps, kind=dist.kind)
    if isinstance(dist, Continuous1D) or (isinstance(dist, Gaussian) and dist.dim == 1):
        return Symmetrized(dist)
    raise NotSymmetric(f"no symmetrization for {dist.kind} in d = {dist.dim}")


def symmetrize_target(target: Distribution) -> Distribution:
    return symmetrize(target)


def symmetrize_proposal(step: Distribution) -> Distribution:
    return symmetrize(step)
