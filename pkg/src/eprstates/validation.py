"""Input validation helpers shared across the package.

These play the role sklearn's ``check_array`` plays for estimators:
coerce to a canonical dtype, then fail early with a named error.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    InvariantError,
    NonSquareError,
    NotHermitianError,
    NotIsometryError,
    ShapeMismatchError,
)


def as_complex_matrix(data, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, 2-D complex128 array (always a fresh copy)."""
    arr = np.array(data, dtype=np.complex128, copy=True)
    if arr.ndim != 2:
        raise InvariantError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise InvariantError(f"{name} contains NaN or Inf entries")
    return arr


def as_complex_vector(data, name: str = "vector") -> np.ndarray:
    """Coerce to a finite, 1-D complex128 array."""
    arr = np.array(data, dtype=np.complex128, copy=True)
    if arr.ndim != 1:
        raise InvariantError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise InvariantError(f"{name} contains NaN or Inf entries")
    return arr


def check_square(matrix: np.ndarray, name: str = "matrix") -> np.ndarray:
    if matrix.shape[0] != matrix.shape[1]:
        raise NonSquareError(f"{name} must be square, got shape {matrix.shape}")
    return matrix


def check_same_shape(a: np.ndarray, b: np.ndarray, names: str = "operands") -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{names} have shapes {a.shape} and {b.shape}")


def hermiticity_defect(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix - matrix.conj().T))


def check_hermitian(matrix: np.ndarray, zero_threshold: float, name: str = "matrix") -> np.ndarray:
    defect = hermiticity_defect(matrix)
    bound = zero_threshold * (1.0 + float(np.linalg.norm(matrix)))
    if defect > bound:
        raise NotHermitianError(
            f"{name} is not Hermitian: defect {defect:.3e} exceeds {bound:.3e}"
        )
    return matrix


def check_isometry(matrix: np.ndarray, tol: float = 1e-10, name: str = "imbedding") -> np.ndarray:
    gram = matrix.conj().T @ matrix
    defect = float(np.linalg.norm(gram - np.eye(matrix.shape[1])))
    if defect > tol:
        raise NotIsometryError(
            f"{name} is not an isometry: |W†W - I| = {defect:.3e} exceeds {tol:.1e}"
        )
    return matrix
