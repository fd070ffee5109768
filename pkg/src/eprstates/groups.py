"""Quantum kinematics of a particle on a finite abelian group.

The function space over a group G carries the weighted scalar product
(f, g) = (1/|G|) sum_x f(x) conj(g(x)).  Two orthonormal bases matter:
the scaled point masses sqrt(|G|) * delta_x (position) and the
characters (momentum).  All vectors handed to the rest of the package
are coordinates in the position basis, so a function f has coordinates
f(x)/sqrt(|G|) and the standard inner product agrees with the weighted
one.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import DuplicateValuesError, InvariantError, NotNormalizedError, NotPositiveError
from .linalg import DEFAULT_TOL, Tolerances, hermitian_eig
from .measurement import DiscreteJointDistribution, joint_distribution
from .states import HilbertSpace, Observable, PureState
from .validation import as_complex_matrix, check_hermitian, check_square


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Direct product of cyclic groups Z_n1 x ... x Z_nk."""

    cyclic_orders: tuple

    def __post_init__(self):
        orders = tuple(int(n) for n in self.cyclic_orders)
        if not orders or any(n < 1 for n in orders):
            raise InvariantError(f"cyclic orders must be positive, got {orders}")
        object.__setattr__(self, "cyclic_orders", orders)

    @property
    def order(self) -> int:
        return int(np.prod(self.cyclic_orders))

    def elements(self):
        """All group elements as tuples, in lexicographic order."""
        return list(iter_product(*(range(n) for n in self.cyclic_orders)))

    def character_value(self, label, element) -> complex:
        """Value of the character with the given label at a group element."""
        angle = 2.0 * np.pi * sum(
            (x * y) / n for x, y, n in zip(element, label, self.cyclic_orders)
        )
        return complex(np.cos(angle), np.sin(angle))

    def centered_labels(self) -> np.ndarray:
        """Distinct real labels for the elements, centered around zero.

        Each coordinate is replaced by its centered residue (the grid
        convention 0, +-1, ..., +-(n-1)/2 for odd n) and the coordinates
        are combined with mixed-radix weights so the labels stay
        pairwise distinct for product groups.
        """
        orders = self.cyclic_orders
        weights = [int(np.prod(orders[l + 1:])) for l in range(len(orders))]
        labels = []
        for element in self.elements():
            centered = [
                x if x <= (n - 1) // 2 else x - n
                for x, n in zip(element, orders)
            ]
            labels.append(float(sum(c * w for c, w in zip(centered, weights))))
        return np.array(labels)

    def __str__(self):
        return "x".join(str(n) for n in self.cyclic_orders)


def function_space(group: FiniteAbelianGroup) -> HilbertSpace:
    labels = tuple("d" + ",".join(str(c) for c in x) for x in group.elements())
    return HilbertSpace(group.order, labels)


def character_matrix(group: FiniteAbelianGroup) -> np.ndarray:
    """Unitary change of basis from characters to the position basis.

    Column y holds the position coordinates of the character with label
    y, namely xi_y(x) / sqrt(|G|); unitarity is the orthogonality of
    characters.
    """
    elements = group.elements()
    size = group.order
    mat = np.empty((size, size), dtype=np.complex128)
    for j, label in enumerate(elements):
        for i, element in enumerate(elements):
            mat[i, j] = group.character_value(label, element)
    return mat / np.sqrt(size)


def bohm_state(group: FiniteAbelianGroup) -> PureState:
    """The maximally correlated unit state sqrt(|G|) sum_x delta_x (x) delta_x.

    In position coordinates on both factors the coefficient matrix is
    the identity over sqrt(|G|).
    """
    space = function_space(group)
    return PureState(
        np.eye(group.order) / np.sqrt(group.order), space1=space, space2=space
    )


def character_form_state(group: FiniteAbelianGroup) -> PureState:
    """The same state assembled as (1/sqrt(|G|)) sum over characters of
    (inverse character) (x) character."""
    f = character_matrix(group)
    space = function_space(group)
    coeffs = np.conj(f) @ f.T / np.sqrt(group.order)
    return PureState(coeffs, space1=space, space2=space)


def verify_star_identity(group: FiniteAbelianGroup):
    """Both assemblies of the correlated state and their coefficient distance."""
    delta_form = bohm_state(group)
    char_form = character_form_state(group)
    residual = float(np.linalg.norm(delta_form.coeffs - char_form.coeffs))
    return delta_form, char_form, residual


def _check_distinct(values: np.ndarray, kind: str):
    ordered = np.sort(values)
    if ordered.size > 1 and np.min(np.diff(ordered)) <= 1e-12 * (1.0 + np.max(np.abs(ordered))):
        raise DuplicateValuesError(f"{kind} values must be pairwise distinct")


def position_observable(group: FiniteAbelianGroup, values=None,
                        tol: Tolerances = DEFAULT_TOL) -> Observable:
    """Observable diagonal in the position basis with the given distinct values."""
    vals = group.centered_labels() if values is None else np.asarray(values, dtype=float)
    if vals.shape != (group.order,):
        raise InvariantError(
            f"need {group.order} position values, got shape {vals.shape}"
        )
    _check_distinct(vals, "position")
    return Observable(np.diag(vals), tol, space=function_space(group))


def momentum_observable(group: FiniteAbelianGroup, values=None,
                        tol: Tolerances = DEFAULT_TOL) -> Observable:
    """Observable diagonal in the character basis with the given distinct values."""
    vals = group.centered_labels() if values is None else np.asarray(values, dtype=float)
    if vals.shape != (group.order,):
        raise InvariantError(
            f"need {group.order} momentum values, got shape {vals.shape}"
        )
    _check_distinct(vals, "momentum")
    f = character_matrix(group)
    matrix = (f * vals) @ f.conj().T
    matrix = 0.5 * (matrix + matrix.conj().T)
    return Observable(matrix, tol, space=function_space(group))


def conjugated_partner(observable: Observable, tol: Tolerances = DEFAULT_TOL) -> Observable:
    """First-factor copy of a second-factor observable under pointwise conjugation.

    The conjugation map f -> conj(f) has the identity matrix in position
    coordinates, so the partner observable is the entrywise conjugate.
    Position observables are unchanged; momentum observables keep their
    values with inverted characters as eigenstates.
    """
    return Observable(np.conj(observable.matrix), tol, space=observable.space)


def epr_symmetry_table(group: FiniteAbelianGroup, tol: Tolerances = DEFAULT_TOL):
    """Joint position-position and momentum-momentum statistics in the
    correlated state.  Both tables are carried by the diagonal a -> a."""
    state = bohm_state(group)
    position2 = position_observable(group, tol=tol)
    momentum2 = momentum_observable(group, tol=tol)
    position1 = conjugated_partner(position2, tol)
    momentum1 = conjugated_partner(momentum2, tol)
    position_joint = joint_distribution(state, position1, position2, tol)
    momentum_joint = joint_distribution(state, momentum1, momentum2, tol)
    return position_joint, momentum_joint


def spin_observables(group: FiniteAbelianGroup, spin_dim: int,
                     tol: Tolerances = DEFAULT_TOL):
    """Position and momentum acting on the motion factor of L2(G) (x) C^N."""
    if spin_dim < 1:
        raise InvariantError(f"spin dimension must be >= 1, got {spin_dim}")
    eye = np.eye(spin_dim)
    position = position_observable(group, tol=tol)
    momentum = momentum_observable(group, tol=tol)
    space = HilbertSpace(group.order * spin_dim)
    return (
        Observable(np.kron(position.matrix, eye), tol, space=space),
        Observable(np.kron(momentum.matrix, eye), tol, space=space),
    )


def spin_system_state(group: FiniteAbelianGroup, spin_dim: int, rho,
                      tol: Tolerances = DEFAULT_TOL) -> PureState:
    """A state of two copies of L2(G) (x) C^N whose gram operator is
    (1/|G|) I (x) rho.

    ``rho`` must be positive semidefinite with unit trace.  Every such
    state passes the commutation test against position and momentum on
    the motion factor, whatever rho is: those observables only see the
    identity component of the gram operator.
    """
    mat = as_complex_matrix(rho, "rho")
    check_square(mat, "rho")
    if mat.shape[0] != spin_dim:
        raise InvariantError(
            f"rho of shape {mat.shape} does not match spin dimension {spin_dim}"
        )
    check_hermitian(mat, tol.zero_threshold, "rho")
    eigvals, eigvecs = hermitian_eig(mat, tol)
    if eigvals[0] < -1e-10 * (1.0 + abs(float(eigvals[-1]))):
        raise NotPositiveError(
            f"rho has a negative eigenvalue {eigvals[0]:.3e}"
        )
    trace = float(np.sum(eigvals))
    if abs(trace - 1.0) > 1e-10:
        raise NotNormalizedError(f"rho has trace {trace!r}, expected 1")

    root = (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.conj().T
    size = group.order
    coeffs = np.kron(np.eye(size), np.conj(root)) / np.sqrt(size)
    space = HilbertSpace(size * spin_dim)
    return PureState(coeffs, space1=space, space2=space)
