"""Exact lag statistics of Metropolis-Hastings chains on finite state spaces.

The kernel is built directly from its definition: off the diagonal
k(x, y) = q(x, y) * acceptance, and the diagonal absorbs all rejected mass
together with proposals that leave the support of the target. The lag-t
joint law is diag(pi) K^t. With rational inputs every entry is a Fraction
and the statistics below are exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._numbers import is_exact, norm_pow
from .distributions import LatticePMF, _as_point
from .errors import DimensionMismatch, MassError, NotReversible, SupportMismatch
from .mh import ChainSpec, FiniteProposal


@dataclass
class FiniteChain:
    states: list
    pi: list
    q: list
    kernel: np.ndarray
    exact: bool

    @property
    def n(self):
        return len(self.states)

    @property
    def dim(self):
        return len(self.states[0])


def _zero(exact):
    return Fraction(0) if exact else 0.0


def build_kernel(target: LatticePMF, proposal) -> FiniteChain:
    """Kernel of the MH chain with the given lattice target.

    `proposal` is a lattice step law (random walk), a FiniteProposal, or a
    square matrix indexed by the target's support points in sorted order.
    """
    if target.space != "lattice":
        raise SupportMismatch("the exact oracle needs a lattice target")
    states = target.points
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    pi = [target.masses[s] for s in states]

    if isinstance(proposal, LatticePMF):
        if proposal.dim != target.dim:
            raise DimensionMismatch("target and step live in different dimensions")
        q = [[proposal.pmf(tuple(b - a for a, b in zip(x, y))) for y in states] for x in states]
    elif isinstance(proposal, FiniteProposal):
        if proposal.dim != target.dim:
            raise DimensionMismatch("target and proposal live in different dimensions")
        q = [[proposal.density(x, y) for y in states] for x in states]
    else:
        q = [list(row) for row in proposal]
        if len(q) != n or any(len(row) != n for row in q):
            raise SupportMismatch(f"proposal matrix must be {n} x {n} over the target support")
        for row in q:
            tot = sum(row)
            if any(v < 0 for v in row) or (is_exact(tot) and tot != 1) or abs(float(tot) - 1) > 1e-12:
                raise MassError("explicit proposal rows must be nonnegative and sum to 1")

    exact = all(is_exact(v) for v in pi) and all(is_exact(v) for row in q for v in row)
    K = np.empty((n, n), dtype=object if exact else float)
    for i in range(n):
        off = _zero(exact)
        for j in range(n):
            if i == j:
                continue
            # pi_i k_ij = min(pi_i q_ij, pi_j q_ji)
            a = pi[i] * q[i][j]
            b = pi[j] * q[j][i]
            if a == 0:
                kij = _zero(exact)
            else:
                kij = (min(a, b) / pi[i]) if exact else float(min(a, b)) / float(pi[i])
            K[i, j] = kij
            off += kij
        K[i, i] = 1 - off
    return FiniteChain(states, pi, q, K, exact)


def kernel_from_spec(spec: ChainSpec) -> FiniteChain:
    return build_kernel(spec.target, spec.proposal)


def _matpow(K, t, exact):
    n = K.shape[0]
    if exact:
        P = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                P[i, j] = Fraction(int(i == j))
        for _ in range(t):
            P = P.dot(K)
        return P
    return np.linalg.matrix_power(np.asarray(K, dtype=float), t)


@dataclass
class ExactLagStats:
    lag: int
    incr_moments: dict
    trace_cov: object
    trace_var: object
    trace_corr: object
    linear_cov: dict = field(default_factory=dict)
    cond_mean_trace_var: object = None
    error_bound: float = 0.0


def _mean(chain):
    d = chain.dim
    return tuple(sum((p * s[k] for s, p in zip(chain.states, chain.pi)), _zero(chain.exact)) for k in range(d))


def exact_lag_stats(chain: FiniteChain, t: int = 1, r_list=(2,), c_list=()) -> ExactLagStats:
    if t < 0:
        raise ValueError("lag must be nonnegative")
    ex = chain.exact
    P = _matpow(chain.kernel, t, ex)
    S = chain.states
    mu = _mean(chain)
    cen = [tuple(a - b for a, b in zip(s, mu)) for s in S]
    n = chain.n
    z = _zero(ex)
    J = [[chain.pi[i] * P[i, j] for j in range(n)] for i in range(n)]

    incr = {}
    for r in r_list:
        acc = z
        for i in range(n):
            for j in range(n):
                if J[i][j] != 0 and i != j:
                    acc += J[i][j] * norm_pow(tuple(b - a for a, b in zip(S[i], S[j])), r)
        incr[r] = acc

    dot = lambda u, v: sum((a * b for a, b in zip(u, v)), z)
    tvar = sum((chain.pi[i] * dot(cen[i], cen[i]) for i in range(n)), z)
    tcov = sum((J[i][j] * dot(cen[i], cen[j]) for i in range(n) for j in range(n)), z)
    corr = (tcov / tvar) if tvar != 0 else None

    lin = {}
    for k, c in enumerate(c_list):
        c = tuple(c) if not np.isscalar(c) else (c,)
        if len(c) != chain.dim:
            raise DimensionMismatch("c has the wrong length")
        proj = [dot(c, v) for v in cen]
        lin[k] = sum((J[i][j] * proj[i] * proj[j] for i in range(n) for j in range(n)), z)

    # variance of the one-step conditional mean E[X_1 | X_0]
    K = chain.kernel
    cm = [tuple(sum((K[i, j] * cen[j][k] for j in range(n)), z) for k in range(chain.dim)) for i in range(n)]
    cmv = sum((chain.pi[i] * dot(cm[i], cm[i]) for i in range(n)), z)

    err = 0.0
    if not ex:
        scale = 1.0 + max(float(dot(v, v)) for v in cen)
        err = 64 * np.finfo(float).eps * n * (t + 1) * scale
    return ExactLagStats(t, incr, tcov, tvar, corr, lin, cmv, err)


def check_reversibility(chain: FiniteChain):
    """max |pi_i k_ij - pi_j k_ji| over all pairs."""
    worst = _zero(chain.exact)
    K = chain.kernel
    for i in range(chain.n):
        for j in range(i + 1, chain.n):
            d = abs(chain.pi[i] * K[i, j] - chain.pi[j] * K[j, i])
            if d > worst:
                worst = d
    return worst


def require_reversible(chain: FiniteChain, tol=1e-12):
    gap = check_reversibility(chain)
    if gap > tol:
        raise NotReversible(f"detailed balance off by {float(gap):.3g}")
    return gap


def stationarity_gap(chain: FiniteChain):
    pi = np.array(chain.pi, dtype=object if chain.exact else float)
    res = pi.dot(chain.kernel) - pi
    return max(abs(v) for v in res)
