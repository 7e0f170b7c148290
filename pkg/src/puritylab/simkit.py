"""Von Neumann spin measurements on product states.

Every copy measured along unit axis m yields +1 with probability
(1 + r.m)/2, so a block of shots is a single binomial draw.

Random streams are counter-based: ``stream(seed, index)`` keys a Philox
generator with the master seed and a stream index, so the draws of a given
index never depend on which other streams were consumed, or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BlochVector

__all__ = [
    "CountPair",
    "AxisCounts",
    "AXES",
    "stream",
    "split_shots",
    "outcome_probability",
    "measure_axis",
    "measure_batch",
    "tomography_counts",
    "tomography_batch",
]

AXES = np.eye(3)
_UNIT_TOL = 1e-9
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class CountPair:
    plus: int
    minus: int

    @property
    def shots(self) -> int:
        return self.plus + self.minus

    @property
    def frequency(self) -> float:
        return self.plus / self.shots


@dataclass(frozen=True)
class AxisCounts:
    x: CountPair
    y: CountPair
    z: CountPair

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def as_arrays(self):
        """(plus, shots) as integer arrays ordered x, y, z."""
        return (np.array([c.plus for c in self]), np.array([c.shots for c in self]))


def stream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for stream ``index`` under ``master_seed``."""
    key = (int(master_seed) & _MASK64) | ((int(index) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def split_shots(n0: int):
    """Split n0 tomography shots over x, y, z; the remainder goes to x, then y."""
    if n0 < 3:
        raise ValueError(f"tomography needs at least 3 shots, got {n0}")
    q, rem = divmod(int(n0), 3)
    return tuple(q + (i < rem) for i in range(3))


def outcome_probability(bloch, axis):
    """P(+1) for Bloch vectors ``bloch`` measured along ``axis`` (row-wise)."""
    p = 0.5 * (1.0 + np.einsum("...i,...i->...", bloch, axis))
    return np.clip(p, 0.0, 1.0)


def _check_axis(axis):
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis, axis=-1)
    if np.any(np.abs(n - 1.0) > _UNIT_TOL):
        raise ValueError("measurement axis must be a unit vector")
    return axis


def measure_batch(bloch, axis, shots, rng: np.random.Generator):
    """Number of +1 outcomes for each row of ``bloch`` measured along ``axis``.

    ``bloch`` has shape (T, 3); ``axis`` broadcasts against it and ``shots``
    against T.  One binomial draw per row.
    """
    axis = _check_axis(axis)
    shots = np.asarray(shots)
    if np.any(shots < 0):
        raise ValueError("shots must be non-negative")
    return rng.binomial(shots, outcome_probability(bloch, axis))


def measure_axis(state: BlochVector, axis, shots: int, rng: np.random.Generator) -> CountPair:
    plus = int(measure_batch(state.vector[None, :], axis, shots, rng)[0])
    return CountPair(plus, int(shots) - plus)


def tomography_batch(bloch, n0: int, rng: np.random.Generator):
    """Tomography on every row of ``bloch``; returns (plus, shots), each (T, 3)."""
    bloch = np.asarray(bloch, dtype=float)
    budget = np.array(split_shots(n0))
    plus = np.empty(bloch.shape, dtype=np.int64)
    for i in range(3):
        plus[:, i] = measure_batch(bloch, AXES[i], budget[i], rng)
    return plus, np.broadcast_to(budget, bloch.shape)


def tomography_counts(state: BlochVector, n0: int, rng: np.random.Generator) -> AxisCounts:
    plus, shots = tomography_batch(state.vector[None, :], n0, rng)
    return AxisCounts(*(CountPair(int(p), int(s - p)) for p, s in zip(plus[0], shots[0])))
