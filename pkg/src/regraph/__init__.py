"""Simulation laboratory for cycle counts, cyclically non-backtracking walks,
and linear eigenvalue statistics of random regular graphs.

Subpackages cover exact word combinatorics, graph samplers and couplings,
walk/cycle census machinery, spectral linear statistics, Poisson limit
experiments, the growing-graph process, its limiting Markov process, and
numerical checks of the Gaussian-field covariance structure.
"""

__version__ = "0.1.0"

from .errors import InvalidInputError, NumericError, RegraphError, ResourceLimitError

__all__ = [
    "__version__",
    "RegraphError",
    "InvalidInputError",
    "ResourceLimitError",
    "NumericError",
]
