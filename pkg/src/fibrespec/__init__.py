"""Laplace-Beltrami spectra on fibred manifolds and fiberwise symmetrization."""

from fibrespec.errors import (
    EigenSolverError,
    FibrespecError,
    MeshError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "EigenSolverError",
    "FibrespecError",
    "MeshError",
    "ValidationError",
    "__version__",
]
