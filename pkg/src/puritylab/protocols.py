"""Separable purity-estimation protocols and their Monte Carlo averages.

Adaptive (one-step) protocol: spend N0 = round(N^alpha) copies on three-axis
tomography, estimate the direction n from the relative frequencies, measure
the remaining N1 copies along the estimate and report R = 2 N+/N1 - 1.

Greedy protocol: measure every copy along one fixed axis and report
|2 N+/N - 1|.

Trials are simulated in blocks of ``BLOCK_SIZE``; block b always draws from
``stream(master_seed, b)`` so results do not depend on the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BlochVector,
    PurityEstimate,
    PurityPrior,
    fidelity,
    sample_directions,
    sample_radii,
)
from .simkit import AxisCounts, measure_batch, stream, tomography_batch

__all__ = [
    "AdaptiveConfig",
    "GreedyConfig",
    "ProtocolTrial",
    "TrialBatch",
    "McSummary",
    "estimate_direction",
    "estimate_directions",
    "run_adaptive",
    "run_greedy",
    "simulate",
    "mc_average",
    "summarize",
    "validity_window",
    "predicted_fixed_r_fidelity",
    "predicted_theta2",
]

BLOCK_SIZE = 4096
Z_AXIS = np.array([0.0, 0.0, 1.0])


def validity_window(lam: float):
    """Open interval of alpha for which the adaptive protocol is asymptotically optimal."""
    return max(0.5, 1.0 / (2.0 - lam)), 1.0


@dataclass(frozen=True)
class AdaptiveConfig:
    """Adaptive protocol settings.

    N0 = round(N**alpha), raised to 3 if smaller.  ``tomography_copies``
    pins N0 directly; alpha is then only used for the validity flag.
    """

    total_copies: int
    alpha: float
    prior: PurityPrior = field(default_factory=PurityPrior.bures)
    tomography_copies: int | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.tomography_copies is not None and self.tomography_copies < 3:
            raise ValueError("tomography needs at least 3 copies")
        if self.n1 < 1:
            raise ValueError(
                f"N={self.total_copies} leaves no copies after {self.n0} tomography shots"
            )

    @classmethod
    def from_split(cls, n0: int, n1: int, prior: PurityPrior | None = None):
        N = n0 + n1
        alpha = math.log(n0) / math.log(N)
        return cls(N, alpha, prior or PurityPrior.bures(), tomography_copies=n0)

    @property
    def n0(self) -> int:
        if self.tomography_copies is not None:
            return self.tomography_copies
        return max(3, int(round(self.total_copies**self.alpha)))

    @property
    def n1(self) -> int:
        return self.total_copies - self.n0

    @property
    def valid(self) -> bool:
        lo, hi = validity_window(self.prior.lam)
        return lo < self.alpha < hi


@dataclass(frozen=True)
class GreedyConfig:
    total_copies: int
    prior: PurityPrior = field(default_factory=PurityPrior.bures)
    axis: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.total_copies < 1:
            raise ValueError("greedy protocol needs at least one copy")


@dataclass(frozen=True)
class ProtocolTrial:
    true_state: BlochVector
    estimated_axis: np.ndarray
    cos_theta: float
    estimate: PurityEstimate
    fidelity: float


@dataclass
class TrialBatch:
    """Per-trial arrays for a Monte Carlo run."""

    purity: np.ndarray
    cos_theta: np.ndarray
    theta: np.ndarray
    raw: np.ndarray
    estimate: np.ndarray
    fidelity: np.ndarray

    @classmethod
    def concatenate(cls, parts):
        return cls(*(np.concatenate([getattr(p, f) for p in parts]) for f in cls.__dataclass_fields__))

    def __len__(self):
        return len(self.fidelity)


@dataclass(frozen=True)
class McSummary:
    mean_fidelity: float
    std_error: float
    trials: int
    master_seed: int
    mean_theta2: float
    mean_theta4: float
    theta2_std_error: float = float("nan")
    theta4_std_error: float = float("nan")
    mean_estimate: float = float("nan")
    estimate_std_error: float = float("nan")
    mean_raw: float = float("nan")
    raw_std_error: float = float("nan")

    @property
    def deficit(self) -> float:
        return 1.0 - self.mean_fidelity


def estimate_directions(plus, shots):
    """Row-wise direction estimates from tomography counts of shape (T, 3)."""
    v = 2.0 * np.asarray(plus, dtype=float) / np.asarray(shots, dtype=float) - 1.0
    norm = np.linalg.norm(v, axis=1)
    out = np.empty_like(v)
    ok = norm > 0
    out[ok] = v[ok] / norm[ok, None]
    out[~ok] = Z_AXIS
    return out


def estimate_direction(counts: AxisCounts) -> np.ndarray:
    plus, shots = counts.as_arrays()
    if np.any(shots < 1):
        raise ValueError("every axis needs at least one shot")
    return estimate_directions(plus[None, :], shots[None, :])[0]


def _angles(bloch, r, axes):
    """cos and angle between the true direction and ``axes``; NaN when r = 0."""
    with np.errstate(invalid="ignore", divide="ignore"):
        n = bloch / r[:, None]
    cos = np.einsum("ij,ij->i", n, axes)
    sin = np.linalg.norm(np.cross(n, axes), axis=1)
    return np.clip(cos, -1.0, 1.0), np.arctan2(sin, cos)


def _finish(r, bloch, axes, raw):
    value = np.clip(raw, 0.0, 1.0)
    cos, theta = _angles(bloch, r, axes)
    return TrialBatch(r, cos, theta, raw, value, fidelity(r, value))


def _adaptive_batch(bloch, r, cfg: AdaptiveConfig, rng, axes=None):
    if axes is None:
        plus, shots = tomography_batch(bloch, cfg.n0, rng)
        axes = estimate_directions(plus, shots)
    n_plus = measure_batch(bloch, axes, cfg.n1, rng)
    raw = 2.0 * n_plus / cfg.n1 - 1.0
    return _finish(r, bloch, axes, raw)


def _greedy_batch(bloch, r, cfg: GreedyConfig, rng):
    axes = np.broadcast_to(np.asarray(cfg.axis, dtype=float), bloch.shape)
    n_plus = measure_batch(bloch, axes, cfg.total_copies, rng)
    raw = np.abs(2.0 * n_plus / cfg.total_copies - 1.0)
    return _finish(r, bloch, axes, raw)


def _single(state: BlochVector):
    bloch = state.vector[None, :]
    return bloch, np.array([min(state.norm, 1.0)])


def _to_trial(state, batch: TrialBatch, axis) -> ProtocolTrial:
    return ProtocolTrial(
        true_state=state,
        estimated_axis=np.asarray(axis, dtype=float),
        cos_theta=float(batch.cos_theta[0]),
        estimate=PurityEstimate(float(batch.estimate[0]), float(batch.raw[0])),
        fidelity=float(batch.fidelity[0]),
    )


def run_adaptive(state: BlochVector, cfg: AdaptiveConfig, rng, axis=None) -> ProtocolTrial:
    """One run of the adaptive protocol on ``state``.

    Passing ``axis`` skips the tomography step and measures the N1 copies
    along the given direction.
    """
    bloch, r = _single(state)
    if axis is not None:
        axes = np.asarray(axis, dtype=float)[None, :]
    else:
        plus, shots = tomography_batch(bloch, cfg.n0, rng)
        axes = estimate_directions(plus, shots)
    batch = _adaptive_batch(bloch, r, cfg, rng, axes=axes)
    return _to_trial(state, batch, axes[0])


def run_greedy(state: BlochVector, N: int, axis, rng) -> ProtocolTrial:
    cfg = GreedyConfig(N, axis=tuple(float(a) for a in axis))
    bloch, r = _single(state)
    return _to_trial(state, _greedy_batch(bloch, r, cfg, rng), axis)


def _run_block(protocol, cfg, size, seed, index, fixed_r):
    rng = stream(seed, index)
    if fixed_r is None:
        r = sample_radii(cfg.prior, rng, size)
    else:
        r = np.full(size, float(fixed_r))
    bloch = r[:, None] * sample_directions(rng, size)
    if protocol == "adaptive":
        return _adaptive_batch(bloch, r, cfg, rng)
    return _greedy_batch(bloch, r, cfg, rng)


def simulate(protocol: str, cfg, trials: int, master_seed: int = 0,
             fixed_r=None, threads: int = 1) -> TrialBatch:
    """Per-trial results of ``trials`` independent runs.

    ``fixed_r`` switches from prior sampling to states of fixed purity with
    isotropic direction.
    """
    if protocol not in ("adaptive", "greedy"):
        raise ValueError(f"unknown protocol {protocol!r}")
    if trials < 1:
        raise ValueError("need at least one trial")
    if fixed_r is not None and not 0.0 <= fixed_r <= 1.0:
        raise ValueError("fixed_r must lie in [0, 1]")
    n_blocks = -(-trials // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, trials - b * BLOCK_SIZE) for b in range(n_blocks)]

    def job(b):
        return _run_block(protocol, cfg, sizes[b], master_seed, b, fixed_r)

    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(n_blocks)))
    else:
        parts = [job(b) for b in range(n_blocks)]
    return TrialBatch.concatenate(parts)


def _mean_and_error(x):
    x = np.asarray(x, dtype=float)
    x = x[np.isfinite(x)]
    if len(x) < 2:
        return float("nan"), float("nan")
    mean = math.fsum(x) / len(x)
    var = math.fsum((x - mean) ** 2) / (len(x) - 1)
    return mean, math.sqrt(var / len(x))


def summarize(batch: TrialBatch, master_seed: int) -> McSummary:
    f, f_err = _mean_and_error(batch.fidelity)
    t2, t2_err = _mean_and_error(batch.theta**2)
    t4, t4_err = _mean_and_error(batch.theta**4)
    est, est_err = _mean_and_error(batch.estimate)
    raw, raw_err = _mean_and_error(batch.raw)
    return McSummary(f, f_err, len(batch), int(master_seed), t2, t4,
                     t2_err, t4_err, est, est_err, raw, raw_err)


def mc_average(protocol: str, cfg, trials: int, master_seed: int = 0,
               fixed_r=None, threads: int = 1) -> McSummary:
    if trials < 2:
        raise ValueError("mc_average needs at least two trials")
    batch = simulate(protocol, cfg, trials, master_seed, fixed_r, threads)
    return summarize(batch, master_seed)


def predicted_theta2(r: float, n0: int) -> float:
    """Asymptotic mean squared tomography angle, 6/N0 (1/r^2 - 1/5)."""
    if r <= 0:
        raise ValueError("direction error is unbounded at r = 0")
    return 6.0 / n0 * (1.0 / r**2 - 0.2)


def predicted_fixed_r_fidelity(r: float, N1: int, theta2: float, theta4: float) -> float:
    """Second-order prediction of the fixed-r average fidelity of the adaptive protocol."""
    if not 0.0 <= r < 1.0:
        raise ValueError("prediction requires 0 <= r < 1")
    if theta2 < 0 or theta4 < 0:
        raise ValueError("angular moments must be non-negative")
    return 1.0 - 1.0 / (2 * N1) + r**2 / (1.0 - r**2) * (theta2 / (4 * N1) - theta4 / 8)
