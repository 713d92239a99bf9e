"""Unit-vector primitives every score is built from.

All computation is float64 regardless of how embeddings are stored on disk.
Cosine similarities are clamped to [-1, 1] so downstream arccos/ordering logic
never sees 1.0000000000000002. A single zero-norm threshold (1e-12) decides
degeneracy everywhere, so error behavior is deterministic across platforms.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateMeanError,
    DimensionMismatchError,
    EmptySetError,
    NonFiniteError,
    ZeroVectorError,
)

# Norms at or below this are treated as zero (degenerate direction).
NORM_EPS = 1e-12


class MeanVector(NamedTuple):
    """Arithmetic mean of unit vectors. Deliberately NOT renormalized.

    A distinct type from a plain embedding so centroids cannot silently stand in
    where a unit vector is required.
    """

    values: np.ndarray
    source_count: int


def as_vector(v, *, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionMismatchError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise EmptySetError(f"{name} has no components")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or infinity")
    return arr


def normalize(v) -> np.ndarray:
    """Scale ``v`` to unit L2 norm.

    Raises ZeroVectorError when the norm is at or below 1e-12 and NonFiniteError
    on NaN/inf input. Idempotent up to float rounding.
    """
    arr = as_vector(v)
    norm = float(np.linalg.norm(arr))
    if norm <= NORM_EPS:
        raise ZeroVectorError(f"cannot normalize vector with norm {norm!r}")
    return arr / norm


def cosine(a, b) -> float:
    """Cosine similarity of two vectors, clamped to [-1, 1].

    Inputs need not be unit norm; both must be nonzero, finite, and of equal
    dimension.
    """
    va = as_vector(a, name="a")
    vb = as_vector(b, name="b")
    if va.shape[0] != vb.shape[0]:
        raise DimensionMismatchError(
            f"cosine of {va.shape[0]}-dim and {vb.shape[0]}-dim vectors"
        )
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na <= NORM_EPS or nb <= NORM_EPS:
        raise ZeroVectorError("cosine undefined for (numerically) zero vectors")
    return float(np.clip(float(va @ vb) / (na * nb), -1.0, 1.0))


def mean(vectors) -> MeanVector:
    """Arithmetic mean of a non-empty collection of equal-dimension vectors.

    The result keeps its natural norm (< 1 for non-collinear unit inputs).
    Raises DegenerateMeanError when the inputs cancel to numerically zero,
    because a zero centroid has no usable direction.
    """
    mat = as_matrix(vectors, name="vectors")
    m = mat.mean(axis=0)
    if float(np.linalg.norm(m)) <= NORM_EPS:
        raise DegenerateMeanError(
            f"mean of {mat.shape[0]} vectors cancelled to zero norm"
        )
    return MeanVector(values=m, source_count=int(mat.shape[0]))


def as_matrix(vectors, *, name: str = "vectors") -> np.ndarray:
    """Coerce a collection of vectors to a finite 2-D float64 array (n, d)."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        mat = np.asarray(vectors, dtype=np.float64)
    else:
        rows = [as_vector(v, name=f"{name}[{i}]") for i, v in enumerate(vectors)]
        if not rows:
            raise EmptySetError(f"{name} is empty")
        dims = {r.shape[0] for r in rows}
        if len(dims) > 1:
            raise DimensionMismatchError(
                f"{name} mixes dimensions {sorted(dims)}"
            )
        mat = np.vstack(rows)
    if mat.shape[0] == 0:
        raise EmptySetError(f"{name} is empty")
    if not np.all(np.isfinite(mat)):
        raise NonFiniteError(f"{name} contains NaN or infinity")
    return mat


def row_norms(mat: np.ndarray) -> np.ndarray:
    return np.linalg.norm(mat, axis=1)
