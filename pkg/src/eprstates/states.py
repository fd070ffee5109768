"""Bipartite pure states, observables, and the canonical conjugate-linear map.

A pure state of a composite system is stored as its coefficient matrix
over fixed product bases: entry ``(i, j)`` multiplies ``f_i (x) e_j``
where ``(f_i)`` is the basis of the first factor and ``(e_j)`` of the
second.  The canonical correspondence sends a state to the
conjugate-linear map from the second factor into the first whose matrix
acts as ``u -> A @ conj(u)``; with the row/column convention above the
matrix A is exactly the coefficient matrix.  Unlike the linear map with
the same basis action, this assignment does not depend on which
orthonormal basis of the second factor is used to expand the state,
which is what makes it canonical.

Scalar products here are linear in the first argument and conjugate
linear in the second.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, ShapeMismatchError
from .linalg import DEFAULT_TOL, Tolerances, cluster_eigenvalues, hermitian_eig
from .validation import as_complex_matrix, as_complex_vector, check_hermitian, check_square


@dataclass(frozen=True)
class HilbertSpace:
    """A finite-dimensional complex Hilbert space with a distinguished basis."""

    dim: int
    labels: tuple = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvariantError(f"space dimension must be >= 1, got {self.dim}")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(f"e{i}" for i in range(self.dim)))
        else:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if len(self.labels) != self.dim:
            raise InvariantError(
                f"expected {self.dim} basis labels, got {len(self.labels)}"
            )
        if len(set(self.labels)) != self.dim:
            raise InvariantError("basis labels must be pairwise distinct")


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """Scalar product, linear in the first argument: sum_i u_i conj(v_i)."""
    return complex(np.vdot(v, u))


class PureState:
    """A vector in the tensor product of two spaces, possibly unnormalized.

    Parameters
    ----------
    coeffs : array_like, shape (dim1, dim2)
        Coefficient matrix over the product basis.
    space1, space2 : HilbertSpace, optional
        Factor spaces; inferred from the coefficient shape if omitted.
    """

    def __init__(self, coeffs, space1: HilbertSpace = None, space2: HilbertSpace = None):
        matrix = as_complex_matrix(coeffs, "state coefficients")
        self.space1 = space1 if space1 is not None else HilbertSpace(matrix.shape[0])
        self.space2 = space2 if space2 is not None else HilbertSpace(matrix.shape[1])
        if (self.space1.dim, self.space2.dim) != matrix.shape:
            raise ShapeMismatchError(
                f"coefficients of shape {matrix.shape} do not match spaces "
                f"({self.space1.dim}, {self.space2.dim})"
            )
        matrix.setflags(write=False)
        self.coeffs = matrix

    @property
    def dims(self):
        return (self.space1.dim, self.space2.dim)

    def norm_squared(self) -> float:
        return float(np.linalg.norm(self.coeffs) ** 2)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def normalized(self) -> "PureState":
        n = self.norm()
        if n == 0.0:
            raise InvariantError("cannot normalize the zero state")
        return PureState(self.coeffs / n, self.space1, self.space2)

    def __repr__(self):
        return f"PureState(dims={self.dims}, norm={self.norm():.6g})"


def product_state(u, w) -> PureState:
    """The product state u (x) w."""
    uv = as_complex_vector(u, "first factor")
    wv = as_complex_vector(w, "second factor")
    return PureState(np.outer(uv, wv))


def singlet_state() -> PureState:
    """The two-level singlet (f+ (x) e-  -  f- (x) e+) / sqrt(2)."""
    return PureState(np.array([[0.0, 1.0], [-1.0, 0.0]]) / np.sqrt(2.0))


def maximal_state(dim: int) -> PureState:
    """The maximally correlated state sum_i f_i (x) e_i / sqrt(dim)."""
    return PureState(np.eye(dim) / np.sqrt(dim))


class ConjugateLinearMap:
    """A conjugate-linear (antilinear) map between two spaces.

    The stored matrix ``A`` acts on coordinates as ``u -> A @ conj(u)``,
    so additivity holds and scalars come out conjugated.
    """

    def __init__(self, matrix, domain: HilbertSpace = None, codomain: HilbertSpace = None):
        mat = as_complex_matrix(matrix, "map matrix")
        self.domain = domain if domain is not None else HilbertSpace(mat.shape[1])
        self.codomain = codomain if codomain is not None else HilbertSpace(mat.shape[0])
        if (self.codomain.dim, self.domain.dim) != mat.shape:
            raise ShapeMismatchError(
                f"matrix of shape {mat.shape} does not map dim {self.domain.dim} "
                f"into dim {self.codomain.dim}"
            )
        mat.setflags(write=False)
        self.matrix = mat

    def __call__(self, u) -> np.ndarray:
        return apply_conjugate_linear(self, u)

    def hs_norm(self) -> float:
        """Hilbert-Schmidt norm sqrt(Tr(L†L))."""
        return float(np.linalg.norm(self.matrix))

    def adjoint(self) -> "ConjugateLinearMap":
        return adjoint(self)

    def __repr__(self):
        return (
            f"ConjugateLinearMap(dim {self.domain.dim} -> {self.codomain.dim}, "
            f"hs_norm={self.hs_norm():.6g})"
        )


class Observable:
    """A Hermitian operator with a cached clustered spectral decomposition.

    ``values`` holds the cluster representatives (ascending) and
    ``blocks[k]`` the orthonormal eigenvectors of cluster ``k`` as
    columns; together the blocks resolve the identity.
    """

    def __init__(self, matrix, tol: Tolerances = DEFAULT_TOL, space: HilbertSpace = None):
        mat = as_complex_matrix(matrix, "observable matrix")
        check_square(mat, "observable matrix")
        check_hermitian(mat, tol.zero_threshold, "observable matrix")
        self.space = space if space is not None else HilbertSpace(mat.shape[0])
        if self.space.dim != mat.shape[0]:
            raise ShapeMismatchError(
                f"observable of dimension {mat.shape[0]} does not act on "
                f"a space of dimension {self.space.dim}"
            )
        mat.setflags(write=False)
        self.matrix = mat
        self.tol = tol

        eigvals, eigvecs = hermitian_eig(mat, tol)
        clusters = cluster_eigenvalues(eigvals, tol)
        self.eigenvalues = eigvals
        self.values = np.array([rep for rep, _ in clusters])
        self.blocks = [eigvecs[:, start:stop] for _, (start, stop) in clusters]

    @property
    def dim(self) -> int:
        return self.space.dim

    def multiplicity(self, k: int) -> int:
        return self.blocks[k].shape[1]

    def projector(self, k: int) -> np.ndarray:
        block = self.blocks[k]
        return block @ block.conj().T

    def __repr__(self):
        return f"Observable(dim={self.dim}, values={np.round(self.values, 6)})"


def canonical_map(state: PureState) -> ConjugateLinearMap:
    """The conjugate-linear map canonically attached to a bipartite state.

    Sends the second-factor basis vector ``e_n`` to the n-th coefficient
    column; with our storage convention the matrix is the coefficient
    matrix itself.  The result does not depend on the basis used to
    expand the state, which fails for the linear map with the same
    basis action.
    """
    return ConjugateLinearMap(state.coeffs, domain=state.space2, codomain=state.space1)


def inverse_canonical(cmap: ConjugateLinearMap) -> PureState:
    """Reassemble the state sum_n (L e_n) (x) e_n from its canonical map."""
    return PureState(cmap.matrix, space1=cmap.codomain, space2=cmap.domain)


def apply_conjugate_linear(cmap: ConjugateLinearMap, u) -> np.ndarray:
    """Apply the map to a vector of the domain space: A @ conj(u)."""
    vec = as_complex_vector(u, "argument")
    if vec.shape[0] != cmap.domain.dim:
        raise ShapeMismatchError(
            f"argument of dimension {vec.shape[0]} is not in the domain "
            f"(dim {cmap.domain.dim})"
        )
    return cmap.matrix @ np.conj(vec)


def adjoint(cmap: ConjugateLinearMap) -> ConjugateLinearMap:
    """The adjoint map, defined by (L u, v) = (L† v, u).

    For a conjugate-linear map with matrix A the adjoint has matrix A^T
    (plain transpose, no conjugation) and swapped domain/codomain.
    """
    return ConjugateLinearMap(cmap.matrix.T, domain=cmap.codomain, codomain=cmap.domain)


def gram_matrix(cmap: ConjugateLinearMap) -> np.ndarray:
    """Matrix of the (linear) positive operator L†L on the domain space."""
    return cmap.matrix.T @ np.conj(cmap.matrix)


def gram(cmap: ConjugateLinearMap, tol: Tolerances = DEFAULT_TOL) -> Observable:
    """The positive operator L†L on the domain space, as an Observable."""
    g = gram_matrix(cmap)
    # Composition of a map with its adjoint is exactly Hermitian up to rounding.
    g = 0.5 * (g + g.conj().T)
    return Observable(g, tol, space=cmap.domain)


def state_norm_identity(state: PureState):
    """Both sides of the norm identity |state|^2 = Tr(L†L)."""
    lhs = state.norm_squared()
    rhs = float(np.trace(gram_matrix(canonical_map(state))).real)
    return lhs, rhs
