"""Exact tools for integrality numbers of integer programs.

Given A with full column rank, :func:`synthesize` builds an integer matrix W
such that every vertex of conv{x : A x <= b, W x integral} is integral for
all b. The oracle module checks such claims by enumeration.
"""

from .errors import (
    BoundednessError,
    CapExceededError,
    CertificationError,
    CoverError,
    DimensionError,
    InternalConsistencyError,
    InthullError,
    PreconditionError,
    RankError,
    SingularMatrixError,
)
from .exactla import IntMatrix, RatMatrix, as_matrix, delta, det, hnf, parallelepiped_points
from .oracle import Instance, integer_hull_points, verify_integrality, wmip_vertices
from .wsynth import certify, is_tu, synthesize

__version__ = "0.1.0"

__all__ = [
    "BoundednessError",
    "CapExceededError",
    "CertificationError",
    "CoverError",
    "DimensionError",
    "Instance",
    "IntMatrix",
    "InternalConsistencyError",
    "InthullError",
    "PreconditionError",
    "RankError",
    "RatMatrix",
    "SingularMatrixError",
    "as_matrix",
    "certify",
    "delta",
    "det",
    "hnf",
    "integer_hull_points",
    "is_tu",
    "parallelepiped_points",
    "synthesize",
    "verify_integrality",
    "wmip_vertices",
]
