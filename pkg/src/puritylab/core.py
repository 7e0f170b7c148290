"""Qubit states, the purity fidelity and the radial prior family.

A qubit state rho = (1 + r.sigma)/2 is represented by its Bloch vector r.
Purity estimation only cares about the length r = |r|, scored by

    f(r, R) = r R + sqrt(1 - r^2) sqrt(1 - R^2).

Priors are isotropic in direction with radial density

    w(r) = (4/sqrt(pi)) Gamma(5/2 - lam)/Gamma(1 - lam) r^2 (1 - r^2)^(-lam),

lam < 1.  lam = 1/2 is the Bures prior, lam = 0 the hard-sphere prior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

__all__ = [
    "BlochVector",
    "PurityPrior",
    "PurityEstimate",
    "fidelity",
    "bures_distance",
    "prior_density",
    "sample_state",
    "sample_radii",
    "sample_directions",
    "clamp_estimate",
]

_NORM_TOL = 1e-12
_BELOW_ONE = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm > 1.0 + _NORM_TOL:
            raise ValueError(f"Bloch vector norm {self.norm!r} exceeds 1")

    @classmethod
    def from_polar(cls, r: float, direction) -> "BlochVector":
        d = np.asarray(direction, dtype=float)
        return cls(*(float(c) for c in r * d))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def purity(self) -> float:
        return min(self.norm, 1.0)

    @property
    def direction(self) -> np.ndarray:
        """Unit vector along the Bloch vector.

        Raises ValueError for the maximally mixed state, where no direction
        exists.
        """
        r = self.norm
        if r == 0.0:
            raise ValueError("direction undefined for r = 0")
        return self.vector / r


@dataclass(frozen=True)
class PurityPrior:
    """Radial prior w(r) ~ r^2 (1 - r^2)^(-lam), normalized on [0, 1]."""

    lam: float
    normalization: float = field(init=False)

    def __post_init__(self):
        if not self.lam < 1.0:
            raise ValueError(f"prior requires lam < 1, got {self.lam!r}")
        norm = 4.0 / math.sqrt(math.pi) * math.exp(
            special.gammaln(2.5 - self.lam) - special.gammaln(1.0 - self.lam)
        )
        object.__setattr__(self, "normalization", norm)

    @classmethod
    def bures(cls) -> "PurityPrior":
        return cls(0.5)

    @classmethod
    def hard_sphere(cls) -> "PurityPrior":
        return cls(0.0)

    def density(self, r):
        return prior_density(self, r)


@dataclass(frozen=True)
class PurityEstimate:
    value: float
    raw: float


def _check_purity(name, v):
    a = np.asarray(v, dtype=float)
    if np.any(~((a >= 0.0) & (a <= 1.0))):
        raise ValueError(f"{name} must lie in [0, 1]")
    return a


def fidelity(r, R):
    """Purity fidelity ``r R + sqrt(1-r^2) sqrt(1-R^2)``.

    Accepts scalars or arrays; raises ValueError outside [0, 1].
    """
    r = _check_purity("r", r)
    R = _check_purity("R", R)
    f = r * R + np.sqrt((1.0 - r) * (1.0 + r)) * np.sqrt((1.0 - R) * (1.0 + R))
    f = np.clip(f, 0.0, 1.0)
    return float(f) if f.ndim == 0 else f


def bures_distance(r, R):
    f = fidelity(r, R)
    return 0.5 * np.arccos(f) if np.ndim(f) else 0.5 * math.acos(f)


def prior_density(prior: PurityPrior, r):
    r = _check_purity("r", r)
    if prior.lam > 0 and np.any(r == 1.0):
        raise ZeroDivisionError("prior density diverges at r = 1 for lam > 0")
    with np.errstate(divide="ignore"):
        w = prior.normalization * r * r * ((1.0 - r) * (1.0 + r)) ** (-prior.lam)
    return float(w) if w.ndim == 0 else w


def sample_radii(prior: PurityPrior, rng: np.random.Generator, size=None):
    # r^2 ~ Beta(3/2, 1 - lam) is exactly the radial law of the prior.
    s = rng.beta(1.5, 1.0 - prior.lam, size=size)
    # Keep r < 1: pure states have prior measure zero.
    return np.minimum(np.sqrt(s), _BELOW_ONE)


def sample_directions(rng: np.random.Generator, size: int) -> np.ndarray:
    """Isotropic unit vectors, shape (size, 3)."""
    v = rng.standard_normal((size, 3))
    n = np.linalg.norm(v, axis=1)
    # A zero normal triple has probability zero; map it to +z to stay total.
    bad = n == 0.0
    if np.any(bad):
        v[bad] = (0.0, 0.0, 1.0)
        n[bad] = 1.0
    return v / n[:, None]


def sample_state(prior: PurityPrior, rng: np.random.Generator) -> BlochVector:
    r = float(sample_radii(prior, rng))
    return BlochVector.from_polar(r, sample_directions(rng, 1)[0])


def clamp_estimate(raw) -> PurityEstimate:
    raw = float(raw)
    return PurityEstimate(value=min(max(raw, 0.0), 1.0), raw=raw)
