"""Optimal joint-measurement bound for purity estimation.

The optimal collective measurement on N copies projects onto the SU(2)
irreducible blocks.  Block j occurs n_j times, is observed with probability
n_j W_j(r), and leads to the guess R_j = A_j / sqrt(A_j^2 + B_j^2) where

    (A_j, B_j) = int_0^1 w(r) (r, sqrt(1 - r^2)) W_j(r) dr,
    W_j(r)     = sum_{m=-j..j} p^(N/2 - m) q^(N/2 + m),   p, q = (1 -+ r)/2.

The maximum average fidelity is F = sum_j n_j sqrt(A_j^2 + B_j^2).

Spins are carried as the integer ``two_j`` = 2j throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .core import PurityPrior

__all__ = [
    "SpinBlock",
    "JointBoundResult",
    "QuadratureError",
    "spins",
    "multiplicity",
    "log_block_weight",
    "block_weight",
    "block_integrals",
    "optimal_estimate",
    "max_fidelity",
]

DIRECT_SUM_THRESHOLD = 1e-6
BASE_NODES = 256
MAX_NODES = 16384
QUADRATURE_TOL = 1e-9


class QuadratureError(ArithmeticError):
    """Raised when node doubling fails to reach the requested accuracy."""

    def __init__(self, message, achieved=None, two_j=None):
        super().__init__(message)
        self.achieved = achieved
        self.two_j = two_j


@dataclass(frozen=True)
class SpinBlock:
    n_copies: int
    two_j: int
    multiplicity: int
    a_j: float
    b_j: float
    r_j: float
    # n_j * A_j and n_j * B_j; A_j alone underflows for N in the thousands.
    weighted_a: float = float("nan")
    weighted_b: float = float("nan")

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def contribution(self) -> float:
        return math.hypot(self.weighted_a, self.weighted_b)


@dataclass(frozen=True)
class JointBoundResult:
    n_copies: int
    blocks: list
    f_max: float
    gap: float


def _check_block(N, two_j):
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    if not (0 <= two_j <= N) or (two_j - N) % 2:
        raise ValueError(f"two_j={two_j} is not a valid spin for N={N}")


def spins(N: int) -> range:
    """All admissible values of 2j for N qubits, ascending."""
    return range(N % 2, N + 1, 2)


def multiplicity(N: int, two_j: int) -> int:
    """Number of spin-j irreps in (C^2)^{tensor N}, exact integer."""
    N, two_j = int(N), int(two_j)
    _check_block(N, two_j)
    k = (N - two_j) // 2
    num = math.comb(N, k) * (two_j + 1)
    den = (N + two_j) // 2 + 1
    n, rem = divmod(num, den)
    assert rem == 0
    return n


def _log_geometric(n_terms, log_x):
    """log of sum_{i<n_terms} x^i for 0 <= x <= 1, broadcasting."""
    n_terms, log_x = np.broadcast_arrays(np.asarray(n_terms, dtype=float),
                                         np.asarray(log_x, dtype=float))
    shape = n_terms.shape
    n_terms, log_x = n_terms.ravel(), log_x.ravel()
    out = np.empty(n_terms.shape)
    near = -log_x < DIRECT_SUM_THRESHOLD
    far = ~near
    with np.errstate(divide="ignore"):
        out[far] = (np.log(-np.expm1(n_terms[far] * log_x[far]))
                    - np.log(-np.expm1(log_x[far])))
    # Near x = 1 the closed form cancels; sum the terms directly.
    for i in np.flatnonzero(near):
        k = np.arange(int(n_terms[i]))
        out[i] = math.log(math.fsum(np.exp(k * log_x[i])))
    return out.reshape(shape)


def _log_weight_pq(N, two_j, log_p, log_q):
    a = (N - two_j) / 2.0  # exponent of p at the m = j term
    b = (N + two_j) / 2.0
    log_x = log_p - log_q
    # 0^0 = 1: the p factor is absent when its exponent vanishes.
    with np.errstate(invalid="ignore"):
        p_term = np.where(a == 0, 0.0, a * log_p)
    out = p_term + b * log_q + _log_geometric(two_j + 1, log_x)
    # At p = 0 the geometric sum collapses to its first term, log 1 = 0.
    return np.where(np.isneginf(log_p) & (a == 0), b * log_q, out)


def log_block_weight(N: int, two_j, r, one_minus_r=None):
    """log W_j(r), vectorized over ``two_j`` and ``r`` by broadcasting.

    ``one_minus_r`` may be passed to avoid cancellation when r is close to 1.
    """
    two_j = np.asarray(two_j)
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise ValueError("r must lie in [0, 1]")
    s = 1.0 - r if one_minus_r is None else np.asarray(one_minus_r, dtype=float)
    with np.errstate(divide="ignore"):
        log_p = np.log(s) - math.log(2.0)
    log_q = np.log1p(r) - math.log(2.0)
    return _log_weight_pq(N, two_j, log_p, log_q)


def block_weight(N: int, two_j: int, r):
    """Probability tr[rho^N P_{j,alpha}] for one copy of block j."""
    _check_block(N, two_j)
    w = np.exp(log_block_weight(N, two_j, r))
    return float(w) if w.ndim == 0 else w


@lru_cache(maxsize=64)
def _radial_rule(n: int, lam: float):
    """Nodes (r, 1 - r) and weights on [0, 1] for integrands with (1 - r)^(-lam).

    Plain Gauss-Legendre on [0, 1/2].  On [1/2, 1] the substitution
    1 - r = t^k / 2 with k = max(1, 2/(1 - lam)) turns (1 - r)^(-lam) dr into
    a factor t^(k(1 - lam) - 1) that is at least linear, so both A_j and B_j
    integrands are smooth in t.
    """
    x, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (x + 1.0)
    w = 0.5 * w
    k = max(1.0, 2.0 / (1.0 - lam))
    s_hi = 0.5 * t**k
    r = np.concatenate([0.5 * t, 1.0 - s_hi])
    s = np.concatenate([1.0 - 0.5 * t, s_hi])
    weights = np.concatenate([0.5 * w, w * 0.5 * k * t ** (k - 1.0)])
    return r, s, weights


def _weighted_integrals(N, prior, n_nodes):
    """n_j A_j and n_j B_j for every block of N, ascending two_j."""
    two_js = np.array(spins(N))
    log_mult = np.array([math.log(multiplicity(N, t)) for t in two_js])
    r, s, w = _radial_rule(n_nodes, prior.lam)
    one_minus_r2 = s * (1.0 + r)
    dens = prior.normalization * r**2 * one_minus_r2 ** (-prior.lam)
    log_w = log_block_weight(N, two_js[:, None], r[None, :], s[None, :])
    prob = np.exp(log_mult[:, None] + log_w)
    wa = prob @ (w * dens * r)
    wb = prob @ (w * dens * np.sqrt(one_minus_r2))
    return two_js, wa, wb


def _converged_integrals(N, prior, tol=None):
    """Weighted integrals, doubling the node count until two rules agree to ``tol``."""
    tol = QUADRATURE_TOL if tol is None else tol
    n = BASE_NODES
    prev = _weighted_integrals(N, prior, n)
    while True:
        n *= 2
        cur = _weighted_integrals(N, prior, n)
        err = np.maximum(np.abs(cur[1] - prev[1]), np.abs(cur[2] - prev[2]))
        worst = int(np.argmax(err))
        if err[worst] <= tol:
            return cur, float(err.max())
        if n >= MAX_NODES:
            raise QuadratureError(
                f"block integrals for N={N}, 2j={cur[0][worst]} did not converge: "
                f"error {err[worst]:.3g} > {tol:.3g} at {n} nodes",
                achieved=float(err[worst]),
                two_j=int(cur[0][worst]),
            )
        prev = cur


def block_integrals(N: int, two_j: int, prior: PurityPrior):
    """(A_j, B_j) for one copy of block j."""
    _check_block(N, two_j)
    (two_js, wa, wb), _ = _converged_integrals(N, prior)
    i = int(np.searchsorted(two_js, two_j))
    log_n = math.log(multiplicity(N, two_j))
    return _unweight(wa[i], log_n), _unweight(wb[i], log_n)


def _unweight(v, log_n):
    return math.exp(math.log(v) - log_n) if v > 0 else 0.0


def optimal_estimate(a_j: float, b_j: float) -> float:
    """Maximizer over R in [0, 1] of a_j R + b_j sqrt(1 - R^2)."""
    if a_j < 0 or b_j < 0:
        raise ValueError("block integrals must be non-negative")
    if a_j == 0 and b_j == 0:
        raise ValueError("optimal estimate undefined when A_j = B_j = 0")
    return a_j / math.hypot(a_j, b_j)


def max_fidelity(N: int, prior: PurityPrior) -> JointBoundResult:
    """Maximum average fidelity over all measurements on N copies.

    Cost is O(N * nodes): every block shares one quadrature rule and the
    closed-form W_j.  Block contributions are summed in ascending two_j with
    ``math.fsum``, so the result does not depend on evaluation order.

    Raises QuadratureError if the integrals do not converge.
    """
    if N < 1:
        raise ValueError(f"need N >= 1, got {N}")
    (two_js, wa, wb), _ = _converged_integrals(N, prior)
    blocks = []
    for t, a, b in zip(two_js, wa, wb):
        t = int(t)
        n_j = multiplicity(N, t)
        log_n = math.log(n_j)
        r_j = optimal_estimate(a, b) if (a > 0 or b > 0) else float("nan")
        blocks.append(SpinBlock(N, t, n_j, _unweight(a, log_n), _unweight(b, log_n),
                                r_j, float(a), float(b)))
    f_max = math.fsum(np.hypot(wa, wb))
    return JointBoundResult(N, blocks, f_max, N * (1.0 - f_max))
