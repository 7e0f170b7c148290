"""Purity estimation of qubit states: joint-measurement bounds and separable protocols."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BlochVector,
    PurityEstimate,
    PurityPrior,
    bures_distance,
    fidelity,
    prior_density,
    sample_state,
)
from .joint import JointBoundResult, SpinBlock, max_fidelity, multiplicity  # noqa: E402
from .protocols import AdaptiveConfig, GreedyConfig, McSummary, mc_average  # noqa: E402

__all__ = [
    "BlochVector",
    "PurityEstimate",
    "PurityPrior",
    "bures_distance",
    "fidelity",
    "prior_density",
    "sample_state",
    "JointBoundResult",
    "SpinBlock",
    "max_fidelity",
    "multiplicity",
    "AdaptiveConfig",
    "GreedyConfig",
    "McSummary",
    "mc_average",
]
