"""Heteroclinic cycle stability for polymatrix replicator games.

Vertex spectra give a heteroclinic graph on the cube; the dual skeleton
turns cycle stability into 2x2 matrix eigenproblems, and a piecewise Möbius
map of the line carries the same information as its periodic points.
"""

from .errors import (
    ConvergenceError,
    HetcycleError,
    IndeterminateError,
    InputError,
    InsufficientDataError,
    NoSignChangeError,
    NonGenericError,
    NotStructuralError,
)
from .game import MU_INTERVAL, PolymatrixGame, build_mu_family

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "HetcycleError",
    "IndeterminateError",
    "InputError",
    "InsufficientDataError",
    "MU_INTERVAL",
    "NoSignChangeError",
    "NonGenericError",
    "NotStructuralError",
    "PolymatrixGame",
    "build_mu_family",
]
