"""Pointwise diagnostics, asymptotic fidelity formulas and scaling fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .core import PurityPrior, fidelity

__all__ = [
    "MseDecomposition",
    "ScalingFit",
    "quantum_fisher",
    "crb_variance",
    "mse_decompose",
    "k_lambda",
    "eq11_lower_bound",
    "gaussian_tomography_deficit",
    "fit_scaling",
    "greedy_fidelity_limit",
]


@dataclass(frozen=True)
class MseDecomposition:
    mse: float
    variance: float
    bias_sq: float


@dataclass(frozen=True)
class ScalingFit:
    """``one_minus_F ~ coefficient * N**exponent``; residual is the RMS log error."""

    coefficient: float
    exponent: float
    residual: float

    def predict(self, N):
        return self.coefficient * np.asarray(N, dtype=float) ** self.exponent


def quantum_fisher(r):
    """Quantum Fisher information 1/(1 - r^2) for the purity."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise ValueError("quantum Fisher information needs 0 <= r < 1 (singular at r = 1)")
    h = 1.0 / ((1.0 - r) * (1.0 + r))
    return float(h) if h.ndim == 0 else h


def crb_variance(r, N):
    """Cramer-Rao variance floor 1/(N H(r))."""
    return 1.0 / (N * quantum_fisher(r))


def mse_decompose(estimates, true_r: float) -> MseDecomposition:
    x = np.asarray(estimates, dtype=float)
    if x.size == 0:
        raise ValueError("no estimates given")
    if x.size < 2:
        raise ValueError("need at least two estimates")
    mean = math.fsum(x) / x.size
    variance = math.fsum((x - mean) ** 2) / x.size
    bias_sq = (mean - true_r) ** 2
    return MseDecomposition(variance + bias_sq, variance, bias_sq)


def k_lambda(lam: float) -> float:
    """Prior-dependent constant of the near-pure-state fidelity loss."""
    if not 0.0 < lam < 1.0:
        raise ValueError(f"k_lambda is defined for 0 < lam < 1, got {lam!r}")
    g = special.gamma
    return (2.0 ** (2.0 - lam) * g(2.5 - lam) * g(1.5 - lam) * g(lam - 2.0)
            / (math.pi * g(1.0 - lam)))


def eq11_lower_bound(N1: int, lam: float, theta2_at_1: float) -> float:
    """1 - 1/(2 N1) - 2^(lam-2) k_lam <Theta^2>^(2-lam), <Theta^2> taken at r = 1."""
    if theta2_at_1 < 0:
        raise ValueError("theta2_at_1 must be non-negative")
    k = k_lambda(lam)
    return 1.0 - 0.5 / N1 - 2.0 ** (lam - 2.0) * k * theta2_at_1 ** (2.0 - lam)


def gaussian_tomography_deficit(N1: int, lam: float, theta2_at_1: float) -> float:
    """Asymptotic 1 - F when Theta^2 is exponentially distributed.

    The near-pure term averages <Theta^(2(2-lam))> rather than
    <Theta^2>^(2-lam); for a Rayleigh-distributed angle that multiplies the
    k_lambda term by Gamma(3 - lam).
    """
    k = k_lambda(lam)
    return 0.5 / N1 + special.gamma(3.0 - lam) * 2.0 ** (lam - 2.0) * k * theta2_at_1 ** (2.0 - lam)


def fit_scaling(points) -> ScalingFit:
    """Least-squares line through (log N, log(1 - F))."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise ValueError("need at least three (N, one_minus_F) pairs")
    N, y = pts[:, 0], pts[:, 1]
    if np.any(N <= 0) or np.any(y <= 0):
        raise ValueError("scaling fit needs positive N and one_minus_F")
    if len(np.unique(N)) != len(N):
        raise ValueError("N values must be distinct")
    x, ly = np.log(N), np.log(y)
    slope, intercept = np.polyfit(x, ly, 1)
    resid = ly - (slope * x + intercept)
    return ScalingFit(math.exp(intercept), float(slope), float(np.sqrt(np.mean(resid**2))))


def greedy_fidelity_limit(prior: PurityPrior) -> float:
    """Large-N average fidelity of the fixed-axis protocol.

    The estimate converges to r |cos theta|, so the limit is
    int w(r) dr int_0^1 f(r, r mu) dmu.
    """
    def inner(r):
        val, _ = integrate.quad(lambda mu: fidelity(r, r * mu), 0.0, 1.0, epsabs=1e-13)
        return val

    c = prior.normalization
    lam = prior.lam
    # weight='alg' integrates (1 - r)^(-lam) exactly.
    val, _ = integrate.quad(
        lambda r: c * r * r * (1.0 + r) ** (-lam) * inner(r),
        0.0, 1.0, weight="alg", wvar=(0.0, -lam), epsabs=1e-12,
    )
    return val
