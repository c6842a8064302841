"""Metropolis-Hastings chains: acceptance, transitions, simulation, path statistics.

Simulation draws from numpy's Philox generator (a counter-based stream). Each
path uses three child streams from one SeedSequence: the initial state, the
proposal draws and the accept uniforms, so draw t of each stream is always
consumed by transition t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._numbers import is_exact
from .distributions import AxisSteps, Distribution, LatticePMF, _as_point
from .errors import DegeneratePath, DimensionMismatch, MassError, PreconditionFailed, SupportMismatch


class FiniteProposal:
    """General proposal kernel on a finite list of lattice states, q[i][j] = q(x_i, x_j)."""

    kind = "finite-proposal"
    space = "lattice"

    def __init__(self, states, matrix):
        self.states = [_as_point(s) for s in states]
        self.dim = len(self.states[0])
        self.index = {s: i for i, s in enumerate(self.states)}
        if len(self.index) != len(self.states):
            raise SupportMismatch("duplicate states")
        q = [list(row) for row in matrix]
        if len(q) != len(self.states) or any(len(row) != len(self.states) for row in q):
            raise SupportMismatch("proposal matrix shape does not match the states")
        for row in q:
            if any(v < 0 for v in row):
                raise MassError("negative proposal probability")
            tot = sum(row)
            if (is_exact(tot) and tot != 1) or abs(float(tot) - 1) > 1e-12:
                raise MassError("proposal rows must sum to 1")
        self.matrix = q

    def density(self, x, y):
        i = self.index.get(_as_point(x))
        j = self.index.get(_as_point(y))
        if i is None or j is None:
            return 0
        return self.matrix[i][j]

    def row(self, x):
        i = self.index[_as_point(x)]
        return [(self.states[j], v) for j, v in enumerate(self.matrix[i]) if v != 0]


def swap_proposal() -> FiniteProposal:
    """On {0, 1}, always propose the other state."""
    return FiniteProposal([0, 1], [[0, 1], [1, 0]])


@dataclass(frozen=True)
class ChainSpec:
    target: Distribution
    proposal: object

    def __post_init__(self):
        if self.target.space != self.proposal.space:
            raise DimensionMismatch("target and proposal live on different spaces")
        if self.target.dim != self.proposal.dim:
            raise DimensionMismatch(f"target is {self.target.dim}-d but proposal is {self.proposal.dim}-d")

    @property
    def random_walk(self) -> bool:
        return not isinstance(self.proposal, FiniteProposal)

    @property
    def space(self):
        return self.target.space

    @property
    def dim(self):
        return self.target.dim


def _density(dist, x):
    if dist.space == "lattice":
        return dist.pmf(x)
    x = np.asarray(x, dtype=float)
    if dist.dim == 1:
        return float(dist.pdf(float(x.reshape(-1)[0])))
    return float(dist.pdf(x))


def proposal_density(spec: ChainSpec, x, y):
    if not spec.random_walk:
        return spec.proposal.density(x, y)
    if spec.space == "lattice":
        z = tuple(b - a for a, b in zip(_as_point(x), _as_point(y)))
        return spec.proposal.pmf(z)
    z = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    return _density(spec.proposal, z)


def acceptance_prob(spec: ChainSpec, x, y):
    """min{1, pi(y) q(y,x) / (pi(x) q(x,y))}, and 1 when the denominator vanishes."""
    if isinstance(spec.proposal, AxisSteps):
        px = _density(spec.target, x)
        if px == 0:
            return 1.0
        py = _density(spec.target, y)
        lr = spec.proposal.log_density_ratio(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))
        if py == 0 or lr == -math.inf:
            return 0.0
        return min(1.0, py / px * math.exp(lr))
    den = _density(spec.target, x) * proposal_density(spec, x, y)
    if den == 0:
        return 1
    num = _density(spec.target, y) * proposal_density(spec, y, x)
    ratio = Fraction(num) / Fraction(den) if is_exact(num) and is_exact(den) else num / den
    return min(1, ratio)


def _draw_step(spec, x, rng):
    """One proposal; consumes exactly one draw block from rng."""
    if not spec.random_walk:
        row = spec.proposal.row(x)
        v = rng.random()
        acc = 0.0
        for y, q in row:
            acc += float(q)
            if v < acc:
                return y
        return row[-1][0]
    z = spec.proposal.sample(rng, 1)[0]
    if spec.space == "lattice":
        return tuple(int(a + b) for a, b in zip(_as_point(x), z))
    return np.asarray(x, dtype=float) + z


def step(spec: ChainSpec, x, rng: np.random.Generator):
    """One transition from x: draw a proposal, then one uniform for the accept test."""
    y = _draw_step(spec, x, rng)
    u = rng.random()
    a = float(acceptance_prob(spec, x, y))
    if u < a:
        return y
    return _as_point(x) if spec.space == "lattice" else np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Path:
    points: np.ndarray  # shape (n, d)
    seed: int
    spec: ChainSpec = field(repr=False)
    accepted: int = 0

    def __len__(self):
        return self.points.shape[0]

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / max(1, len(self) - 1)


def _streams(seed):
    ss = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(s)) for s in ss.spawn(3)]


def _log(v):
    v = float(v)
    return math.log(v) if v > 0 else -math.inf


def simulate(spec: ChainSpec, n: int, seed: int, x0=None) -> Path:
    """Run n - 1 transitions from x0, or from a stationary draw when x0 is None."""
    if n < 1:
        raise ValueError("need n >= 1")
    g_init, g_prop, g_acc = _streams(seed)
    d = spec.dim
    if x0 is None:
        x0 = spec.target.sample(g_init, 1)[0]
    logu = np.log(g_acc.random(n - 1))
    lattice = spec.space == "lattice"
    out = np.empty((n, d), dtype=np.int64 if lattice else float)
    out[0] = np.asarray(_as_point(x0) if lattice else x0).reshape(d)
    accepted = 0

    if not spec.random_walk:
        v = g_prop.random(n - 1)
        x = tuple(int(a) for a in out[0])
        for t in range(n - 1):
            acc = 0.0
            y = None
            for cand, q in spec.proposal.row(x):
                acc += float(q)
                if v[t] < acc:
                    y = cand
                    break
            if y is None:
                y = spec.proposal.row(x)[-1][0]
            if logu[t] < _log(acceptance_prob(spec, x, y)):
                x = y
                accepted += 1
            out[t + 1] = x
        return _freeze(out, seed, spec, accepted)

    z = spec.proposal.sample(g_prop, n - 1)
    if lattice:
        logpi = {p: _log(w) for p, w in spec.target.masses.items()}
        logphi = {p: _log(w) for p, w in spec.proposal.masses.items()}
        x = tuple(int(a) for a in out[0])
        lx = logpi.get(x, -math.inf)
        zs = [tuple(int(a) for a in row) for row in z]
        for t in range(n - 1):
            zt = zs[t]
            y = tuple(a + b for a, b in zip(x, zt))
            ly = logpi.get(y, -math.inf)
            if lx == -math.inf:
                a_log = 0.0
            else:
                back = logphi.get(tuple(-v for v in zt), -math.inf)
                a_log = ly + back - lx - logphi[zt]
            if logu[t] < a_log:
                x, lx = y, ly
                accepted += 1
            out[t + 1] = x
        return _freeze(out, seed, spec, accepted)

    prop = spec.proposal
    if prop.symmetric:
        logq = np.zeros(n - 1)
    elif isinstance(prop, AxisSteps):
        logq = np.array([prop.log_density_ratio(row) for row in z])
    elif d == 1:
        with np.errstate(divide="ignore"):
            logq = np.log(prop.pdf(-z[:, 0])) - np.log(prop.pdf(z[:, 0]))
    else:
        with np.errstate(divide="ignore"):
            logq = np.log(prop.pdf(-z)) - np.log(prop.pdf(z))

    if d == 1:
        lp = spec.target.scalar_log_density()
        x = float(out[0, 0])
        lx = lp(x)
        zz = z[:, 0].tolist()
        lq = logq.tolist()
        lu = logu.tolist()
        col = out[:, 0]
        for t in range(n - 1):
            y = x + zz[t]
            ly = lp(y)
            if lx == -math.inf or lu[t] < ly - lx + lq[t]:
                x, lx = y, ly
                accepted += 1
            col[t + 1] = x
        return _freeze(out, seed, spec, accepted)

    tgt = spec.target
    if hasattr(tgt, "log_pdf_unnormalized"):
        lp = lambda v: float(tgt.log_pdf_unnormalized(v))
    else:
        lp = lambda v: _log(tgt.pdf(v))
    x = out[0].astype(float)
    lx = lp(x)
    for t in range(n - 1):
        y = x + z[t]
        ly = lp(y)
        if lx == -math.inf or logu[t] < ly - lx + logq[t]:
            x, lx = y, ly
            accepted += 1
        out[t + 1] = x
    return _freeze(out, seed, spec, accepted)


def _freeze(out, seed, spec, accepted):
    out.setflags(write=False)
    return Path(out, seed, spec, accepted)


# ------------------------------------------------------------ path statistics


def batch_means_se(series) -> float:
    """Standard error of the mean of a stationary series by batch means,
    batch length floor(sqrt(n))."""
    y = np.asarray(series, dtype=float)
    n = y.size
    b = int(math.isqrt(n))
    a = n // b if b else 0
    if a < 2:
        return math.nan
    bm = y[: a * b].reshape(a, b).mean(axis=1)
    var = b * bm.var(ddof=1)
    return math.sqrt(var / n)


@dataclass
class Estimate:
    value: float
    se: float


@dataclass
class LagStats:
    lag: int
    trace_cov: Estimate
    trace_var: float
    trace_corr: Estimate
    incr_moments: dict
    linear_cov: dict
    pythagoras_residual: float


def _lag_block(A, B):
    mu = 0.5 * (A.mean(axis=0) + B.mean(axis=0))
    Ac, Bc = A - mu, B - mu
    u = (Ac * Bc).sum(axis=1)
    v = 0.5 * ((Ac**2).sum(axis=1) + (Bc**2).sum(axis=1))
    return u, v


def path_stats(path: Path, lags=(1,), r_list=(2,), c_list=()):
    """Plug-in lag statistics with batch-means standard errors.

    The lag-t covariance uses the pooled mean of both lag endpoints, and the
    correlation divides by the pooled trace variance of both endpoints.
    """
    X = np.asarray(path.points, dtype=float)
    n = X.shape[0]
    out = {}
    for t in lags:
        if not 0 <= t < n - 1:
            raise ValueError(f"lag {t} out of range for a path of length {n}")
        A, B = X[: n - t], X[t:]
        u, v = _lag_block(A, B)
        var = float(v.mean())
        if var == 0.0:
            raise DegeneratePath("path has zero pooled variance")
        cov = float(u.mean())
        corr = cov / var
        w = (u - corr * v) / var  # linearized ratio estimator
        diff = B - A
        dn = np.sqrt((diff**2).sum(axis=1))
        incr = {}
        for r in r_list:
            s = dn ** float(r) if float(r) > 0 else (dn > 0).astype(float)
            incr[r] = Estimate(float(s.mean()), batch_means_se(s))
        lin = {}
        for i, c in enumerate(c_list):
            c = np.asarray(c, dtype=float).reshape(-1)
            uc, _ = _lag_block((A @ c)[:, None], (B @ c)[:, None])
            lin[i] = Estimate(float(uc.mean()), batch_means_se(uc))
        resid = cov - (var - 0.5 * float((dn**2).mean()))
        out[t] = LagStats(t, Estimate(cov, batch_means_se(u)), var, Estimate(corr, batch_means_se(w)),
                          incr, lin, abs(resid))
    return out


def mean_estimate(path: Path) -> Estimate:
    X = np.asarray(path.points, dtype=float)
    return Estimate(float(X[:, 0].mean()), batch_means_se(X[:, 0]))


def detailed_balance_counts(path: Path, edges):
    """Transition counts between coarse bins of the first coordinate.

    Returns a list of (a, b, n_ab, n_ba, ok) with ok meaning
    |n_ab - n_ba| <= 4 sqrt(n_ab + n_ba).
    """
    x = np.asarray(path.points, dtype=float)[:, 0]
    lab = np.digitize(x, edges)
    a, b = lab[:-1], lab[1:]
    k = len(edges) + 1
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (a, b), 1)
    res = []
    for i in range(k):
        for j in range(i + 1, k):
            nij, nji = int(counts[i, j]), int(counts[j, i])
            res.append((i, j, nij, nji, abs(nij - nji) <= 4 * math.sqrt(nij + nji)))
    return res
