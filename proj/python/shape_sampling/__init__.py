"""Shape-aware sampling: axis-specific fractal dimension, patch planning and
minimum path-cost skeletons.

Arrays are indexed ``[x, y, z]``; spacing is ``(sx, sy, sz)`` in mm.
"""

from ._core import (
    DegenerateShapeError,
    DimsMismatchError,
    EmptyShapeError,
    Error,
    FormatError,
    IoError,
    PreconditionError,
    UnreachableTargetError,
    UnsupportedDatatypeError,
    fractal_report,
    phantom,
    rank_and_reassign,
    read_volume,
    skeletonize_multiclass,
    weight_map,
)

__all__ = [
    "DegenerateShapeError",
    "DimsMismatchError",
    "EmptyShapeError",
    "Error",
    "FormatError",
    "IoError",
    "PreconditionError",
    "UnreachableTargetError",
    "UnsupportedDatatypeError",
    "fractal_report",
    "phantom",
    "rank_and_reassign",
    "read_volume",
    "skeletonize_multiclass",
    "weight_map",
]
