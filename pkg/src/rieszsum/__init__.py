"""Numerical verification of Riesz-sum identities for divisor problems."""

from .errors import DegenerateGrid, HypothesisError, NonConvergence, PoleError

__version__ = "0.1.0"

__all__ = [
    "DegenerateGrid",
    "HypothesisError",
    "NonConvergence",
    "PoleError",
    "__version__",
]
