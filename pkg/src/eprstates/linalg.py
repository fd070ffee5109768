"""Dense complex Hermitian linear algebra with explicit tolerances.

The eigensolver is a cyclic Jacobi iteration for complex Hermitian
matrices.  Each rotation diagonalizes one 2x2 principal submatrix
exactly; sweeps repeat until the off-diagonal mass is at rounding
level.  This is self-contained, accurate for the dimensions this
package works at (well below 512), and keeps degenerate eigenspaces
honest: within a cluster the returned eigenvectors are an arbitrary
orthonormal basis of the cluster span.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergenceError
from .validation import as_complex_matrix, check_hermitian, check_same_shape, check_square

MAX_JACOBI_SWEEPS = 100


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    eigen_cluster   relative gap below which adjacent eigenvalues are
                    treated as degenerate
    zero_threshold  absolute scale for "numerically zero" quantities
    commutator_tol  relative threshold for the commutation test
    """

    eigen_cluster: float = 1e-8
    zero_threshold: float = 1e-10
    commutator_tol: float = 1e-9

    def __post_init__(self):
        for field in ("eigen_cluster", "zero_threshold", "commutator_tol"):
            if getattr(self, field) < 0:
                raise ValueError(f"{field} must be nonnegative")


DEFAULT_TOL = Tolerances()


def _offdiagonal_norm(a: np.ndarray) -> float:
    return float(np.sqrt(max(np.linalg.norm(a) ** 2 - np.linalg.norm(np.diag(a)) ** 2, 0.0)))


def _jacobi_rotation(a: np.ndarray, vecs: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] with a unitary plane rotation, updating a and vecs in place."""
    apq = a[p, q]
    mag = abs(apq)
    phase = apq / mag
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
    if tau >= 0.0:
        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    # J embeds [[c*phase, s*phase], [-s, c]] at the (p, q) plane; apply J† A J.
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = np.conj(phase) * c * row_p - s * row_q
    a[q, :] = np.conj(phase) * s * row_p + c * row_q
    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = phase * c * col_p - s * col_q
    a[:, q] = phase * s * col_p + c * col_q
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    col_p = vecs[:, p].copy()
    col_q = vecs[:, q].copy()
    vecs[:, p] = phase * c * col_p - s * col_q
    vecs[:, q] = phase * s * col_p + c * col_q


def hermitian_eig(matrix, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Returns ``(values, vectors)`` with eigenvalues sorted ascending and
    ``vectors`` unitary, so ``matrix = vectors @ diag(values) @ vectors.conj().T``
    up to rounding.  Raises NonSquareError / NotHermitianError on bad
    input and NoConvergenceError if the sweep cap is hit.
    """
    a = as_complex_matrix(matrix)
    check_square(a)
    check_hermitian(a, tol.zero_threshold)
    n = a.shape[0]
    # Work on the exact Hermitian part; the check above bounded the defect.
    a = 0.5 * (a + a.conj().T)
    vecs = np.eye(n, dtype=np.complex128)
    if n == 1:
        return np.array([a[0, 0].real]), vecs

    stop = 1e-14 * (1.0 + float(np.linalg.norm(a)))
    converged = False
    for _ in range(MAX_JACOBI_SWEEPS):
        if _offdiagonal_norm(a) <= stop:
            converged = True
            break
        skip = stop / (2.0 * n)
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > skip:
                    _jacobi_rotation(a, vecs, p, q)
    else:
        if _offdiagonal_norm(a) <= stop:
            converged = True
    if not converged:
        raise NoConvergenceError(
            f"Jacobi iteration did not converge in {MAX_JACOBI_SWEEPS} sweeps "
            f"(off-diagonal norm {_offdiagonal_norm(a):.3e})"
        )

    values = np.real(np.diag(a)).copy()
    order = np.argsort(values, kind="stable")
    return values[order], vecs[:, order]


def cluster_eigenvalues(values, tol: Tolerances = DEFAULT_TOL):
    """Group an ascending list of eigenvalues into degeneracy clusters.

    Consecutive values whose gap is at most ``eigen_cluster * (1 + |value|)``
    share a cluster.  Returns a list of ``(representative, (start, stop))``
    pairs where the representative is the cluster mean and the half-open
    index ranges partition ``range(len(values))``.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1:
        raise ValueError("values must be a 1-D sequence")
    if vals.size == 0:
        return []
    if np.any(np.diff(vals) < 0):
        raise ValueError("values must be sorted ascending")

    clusters = []
    start = 0
    for i in range(1, vals.size + 1):
        if i == vals.size:
            clusters.append((float(vals[start:i].mean()), (start, i)))
            break
        gap = vals[i] - vals[i - 1]
        if gap > tol.eigen_cluster * (1.0 + max(abs(vals[i]), abs(vals[i - 1]))):
            clusters.append((float(vals[start:i].mean()), (start, i)))
            start = i
    return clusters


def commutator_norm(a, b) -> float:
    """Frobenius norm of the commutator AB - BA."""
    am = as_complex_matrix(a, "A")
    bm = as_complex_matrix(b, "B")
    check_square(am, "A")
    check_square(bm, "B")
    check_same_shape(am, bm, "commutator operands")
    return float(np.linalg.norm(am @ bm - bm @ am))
