"""Structure analysis of bipartite states: which second-factor observables
does a state predict with certainty, and what does the set of such states
look like.

The central object is the clustered eigendecomposition of the positive
operator L†L attached to the state (its "gram operator").  A state
predicts an observable of the second factor exactly when that observable
commutes with the gram operator; the prediction is realized by an
antiunitary imbedding of the occupied part of the second factor into the
first, and every predicting state arises from weights, orthogonal
blocks, and such an imbedding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import (
    BlocksNotOrthogonalError,
    DimensionMismatchError,
    NotInAlgebraError,
    NotMaximalEprError,
    WeightMismatchError,
    ZeroStateError,
)
from .linalg import DEFAULT_TOL, Tolerances, cluster_eigenvalues, commutator_norm, hermitian_eig
from .states import (
    HilbertSpace,
    Observable,
    PureState,
    canonical_map,
    gram_matrix,
)
from .validation import as_complex_matrix, check_isometry


class AntiunitaryImbedding:
    """A conjugate-linear isometry between spaces: u -> W @ conj(u), W†W = I."""

    def __init__(self, matrix, domain: HilbertSpace = None, codomain: HilbertSpace = None,
                 tol: float = 1e-10):
        mat = as_complex_matrix(matrix, "imbedding matrix")
        check_isometry(mat, tol, "imbedding matrix")
        self.domain = domain if domain is not None else HilbertSpace(mat.shape[1])
        self.codomain = codomain if codomain is not None else HilbertSpace(mat.shape[0])
        if (self.codomain.dim, self.domain.dim) != mat.shape:
            raise DimensionMismatchError(
                f"imbedding matrix of shape {mat.shape} does not map dim "
                f"{self.domain.dim} into dim {self.codomain.dim}"
            )
        mat.setflags(write=False)
        self.matrix = mat

    def __call__(self, u) -> np.ndarray:
        vec = np.asarray(u, dtype=np.complex128)
        return self.matrix @ np.conj(vec)

    def __repr__(self):
        return f"AntiunitaryImbedding(dim {self.domain.dim} -> {self.codomain.dim})"


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Spectral data of the gram operator of a bipartite state.

    lambdas        strictly positive eigenvalues, descending
    multiplicities eigenspace dimensions, aligned with lambdas
    h2_blocks      orthonormal eigenbasis of each eigenspace (columns),
                   in second-factor coordinates
    kernel_basis   orthonormal basis of the kernel, shape (dim2, k)
    imbedding      antiunitary isometry of the occupied subspace into the
                   first factor, expressed in coordinates relative to the
                   concatenated block basis
    """

    lambdas: np.ndarray
    multiplicities: tuple
    h2_blocks: list
    kernel_basis: np.ndarray
    imbedding: AntiunitaryImbedding
    norm_squared: float

    @property
    def rank(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def kernel_dim(self) -> int:
        return int(self.kernel_basis.shape[1])

    @property
    def block_matrix(self) -> np.ndarray:
        """Concatenated eigenbasis of the occupied subspace, shape (dim2, rank)."""
        return np.hstack(self.h2_blocks)

    def total_weight(self) -> float:
        return float(np.dot(self.lambdas, self.multiplicities))

    def is_maximal(self, tol: float = 1e-8) -> bool:
        """Single eigenvalue 1/dim2 with full multiplicity and unit norm."""
        if len(self.lambdas) != 1 or self.kernel_dim != 0:
            return False
        d = self.multiplicities[0]
        return abs(self.lambdas[0] * d - 1.0) <= tol


@dataclass(frozen=True)
class ObservableVerdict:
    label: str
    commutator_norm: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class EprReport:
    """Outcome of the commutation test over a set of observables."""

    is_epr: bool
    per_observable: tuple
    decomposition: SchmidtDecomposition = field(repr=False)


def schmidt_decompose(state: PureState, tol: Tolerances = DEFAULT_TOL) -> SchmidtDecomposition:
    """Clustered eigendecomposition of the gram operator of a state.

    Eigenvalues at or below ``zero_threshold * trace`` are assigned to
    the kernel.  On each positive eigenspace the canonical map equals
    sqrt(lambda) times an antiunitary isometry; those pieces are
    assembled into the imbedding of the occupied subspace.
    """
    if state.norm() <= tol.zero_threshold:
        raise ZeroStateError("cannot decompose a state of numerically zero norm")
    coeff = state.coeffs
    g = gram_matrix(canonical_map(state))
    g = 0.5 * (g + g.conj().T)
    eigvals, eigvecs = hermitian_eig(g, tol)
    trace = float(np.sum(eigvals))
    kernel_cut = tol.zero_threshold * trace

    kernel_cols = [i for i, v in enumerate(eigvals) if v <= kernel_cut]
    positive_cols = [i for i, v in enumerate(eigvals) if v > kernel_cut]
    kernel_basis = eigvecs[:, kernel_cols]

    clusters = cluster_eigenvalues(eigvals[positive_cols], tol)
    lambdas = []
    mults = []
    blocks = []
    imbedding_cols = []
    for rep, (start, stop) in reversed(clusters):
        cols = positive_cols[start:stop]
        basis = eigvecs[:, cols]
        lambdas.append(rep)
        mults.append(len(cols))
        blocks.append(basis)
        # On this eigenspace the canonical map is sqrt(rep) * isometry.
        imbedding_cols.append(coeff @ np.conj(basis) / np.sqrt(rep))

    imbedding = AntiunitaryImbedding(
        np.hstack(imbedding_cols),
        domain=HilbertSpace(sum(mults)),
        codomain=state.space1,
    )
    return SchmidtDecomposition(
        lambdas=np.array(lambdas),
        multiplicities=tuple(mults),
        h2_blocks=blocks,
        kernel_basis=kernel_basis,
        imbedding=imbedding,
        norm_squared=state.norm_squared(),
    )


def imbedded_conjugate(decomposition: SchmidtDecomposition, matrix) -> np.ndarray:
    """Push a second-factor operator through the imbedding: W conj(E† M E) W†.

    This is the raw form of the predictive map, defined for any operator;
    it is also useful for diagnosing states that fail the commutation
    test, where the honest predictive map does not exist.
    """
    blocks = decomposition.block_matrix
    w = decomposition.imbedding.matrix
    compressed = blocks.conj().T @ np.asarray(matrix, dtype=np.complex128) @ blocks
    return w @ np.conj(compressed) @ w.conj().T


class EprAnalyzer(BaseEstimator):
    """Analyzer for the prediction structure of a bipartite pure state.

    Follows the estimator protocol: construct with tolerances, ``fit``
    on a state, then query.  ``predict`` maps a second-factor observable
    to the first-factor observable whose measured value determines it
    with certainty.

    Attributes set by ``fit``
    -------------------------
    decomposition_ : SchmidtDecomposition
    gram_ : ndarray, matrix of the gram operator on the second factor
    lambdas_, multiplicities_ : the positive spectrum with degeneracies
    """

    def __init__(self, eigen_cluster=1e-8, zero_threshold=1e-10, commutator_tol=1e-9):
        self.eigen_cluster = eigen_cluster
        self.zero_threshold = zero_threshold
        self.commutator_tol = commutator_tol

    def _tolerances(self) -> Tolerances:
        return Tolerances(self.eigen_cluster, self.zero_threshold, self.commutator_tol)

    def fit(self, state: PureState, y=None):
        tol = self._tolerances()
        g = gram_matrix(canonical_map(state))
        self.state_ = state
        self.gram_ = 0.5 * (g + g.conj().T)
        self.decomposition_ = schmidt_decompose(state, tol)
        self.lambdas_ = self.decomposition_.lambdas
        self.multiplicities_ = self.decomposition_.multiplicities
        return self

    def _check_fitted(self):
        if not hasattr(self, "decomposition_"):
            raise NotFittedError(
                "this EprAnalyzer is not fitted yet; call fit(state) first"
            )

    def _check_second_factor(self, observable: Observable):
        if observable.dim != self.state_.space2.dim:
            raise DimensionMismatchError(
                f"observable of dimension {observable.dim} does not act on the "
                f"second factor (dim {self.state_.space2.dim})"
            )

    def commutation_defect(self, observable: Observable) -> float:
        """Frobenius norm of the commutator of the gram operator with the observable."""
        self._check_fitted()
        self._check_second_factor(observable)
        return commutator_norm(self.gram_, observable.matrix)

    def _threshold(self, matrix) -> float:
        return (
            self.commutator_tol
            * (1.0 + float(np.linalg.norm(self.gram_)))
            * (1.0 + float(np.linalg.norm(matrix)))
        )

    def contains(self, observable: Observable) -> bool:
        """Whether the observable lies in the commutant of the gram operator."""
        defect = self.commutation_defect(observable)
        return defect <= self._threshold(observable.matrix)

    def report(self, observables, labels=None) -> EprReport:
        """Run the commutation test over a set of observables."""
        self._check_fitted()
        observables = list(observables)
        if labels is None:
            labels = [f"obs{i}" for i in range(len(observables))]
        verdicts = []
        for label, obs in zip(labels, observables):
            defect = self.commutation_defect(obs)
            threshold = self._threshold(obs.matrix)
            verdicts.append(
                ObservableVerdict(label, defect, threshold, defect <= threshold)
            )
        return EprReport(
            is_epr=all(v.passed for v in verdicts),
            per_observable=tuple(verdicts),
            decomposition=self.decomposition_,
        )

    def predict_matrix(self, matrix) -> np.ndarray:
        """Image of an arbitrary commutant element under the predictive map.

        The map is conjugate linear and multiplicative: compress to the
        occupied subspace, conjugate the entries, and push through the
        imbedding.  The result acts on the first factor and vanishes on
        the complement of the image of the imbedding.
        """
        self._check_fitted()
        mat = as_complex_matrix(matrix, "operator")
        if mat.shape != (self.state_.space2.dim,) * 2:
            raise DimensionMismatchError(
                f"operator of shape {mat.shape} does not act on the second "
                f"factor (dim {self.state_.space2.dim})"
            )
        defect = commutator_norm(self.gram_, mat)
        if defect > self._threshold(mat):
            raise NotInAlgebraError(
                f"operator does not commute with the gram operator "
                f"(commutator norm {defect:.3e})"
            )
        return imbedded_conjugate(self.decomposition_, mat)

    def predict(self, observable: Observable) -> Observable:
        """The first-factor observable predicting the given one with certainty."""
        self._check_second_factor(observable)
        image = self.predict_matrix(observable.matrix)
        image = 0.5 * (image + image.conj().T)
        return Observable(image, self._tolerances(), space=self.state_.space1)


def is_epr(state: PureState, observables, tol: Tolerances = DEFAULT_TOL,
           labels=None) -> EprReport:
    """Commutation test of a state against a set of second-factor observables."""
    analyzer = EprAnalyzer(tol.eigen_cluster, tol.zero_threshold, tol.commutator_tol)
    return analyzer.fit(state).report(observables, labels)


def epr_algebra_contains(state: PureState, observable: Observable,
                         tol: Tolerances = DEFAULT_TOL) -> bool:
    """Membership of an observable in the commutant of the state's gram operator."""
    analyzer = EprAnalyzer(tol.eigen_cluster, tol.zero_threshold, tol.commutator_tol)
    return analyzer.fit(state).contains(observable)


def predictive_map(state: PureState, observable: Observable,
                   tol: Tolerances = DEFAULT_TOL) -> Observable:
    """The first-factor partner observable; raises NotInAlgebraError otherwise."""
    analyzer = EprAnalyzer(tol.eigen_cluster, tol.zero_threshold, tol.commutator_tol)
    return analyzer.fit(state).predict(observable)


def construct_epr_state(lambdas, blocks, imbedding: AntiunitaryImbedding) -> PureState:
    """Assemble the predicting state with the given weights, blocks, and imbedding.

    ``blocks[j]`` is an orthonormal basis (columns) of the j-th subspace
    of the second factor and ``lambdas[j]`` its weight; the weights must
    satisfy sum_j lambdas[j] * dim(block_j) = 1.  The imbedding is taken
    in coordinates relative to the concatenated block basis, exactly as
    returned inside SchmidtDecomposition.
    """
    weights = np.asarray(lambdas, dtype=float)
    if weights.ndim != 1 or weights.size == 0 or weights.size != len(blocks):
        raise WeightMismatchError(
            f"need one positive weight per block, got {weights.size} weights "
            f"for {len(blocks)} blocks"
        )
    if np.any(weights <= 0):
        raise WeightMismatchError("weights must be strictly positive")

    block_arrays = [as_complex_matrix(b, f"block {j}") for j, b in enumerate(blocks)]
    dim2 = block_arrays[0].shape[0]
    if any(b.shape[0] != dim2 for b in block_arrays):
        raise BlocksNotOrthogonalError("blocks live in spaces of different dimensions")
    concat = np.hstack(block_arrays)
    rank = concat.shape[1]
    overlap = concat.conj().T @ concat
    if np.linalg.norm(overlap - np.eye(rank)) > 1e-10:
        raise BlocksNotOrthogonalError(
            "block columns are not mutually orthonormal "
            f"(Gram defect {np.linalg.norm(overlap - np.eye(rank)):.3e})"
        )

    mults = np.array([b.shape[1] for b in block_arrays])
    total = float(np.dot(weights, mults))
    if abs(total - 1.0) > 1e-10:
        raise WeightMismatchError(
            f"weights times multiplicities sum to {total!r}, expected 1"
        )
    if imbedding.domain.dim != rank:
        raise DimensionMismatchError(
            f"imbedding domain has dimension {imbedding.domain.dim}, "
            f"expected the total block dimension {rank}"
        )
    check_isometry(imbedding.matrix, 1e-10, "imbedding matrix")

    scale = np.repeat(np.sqrt(weights), mults)
    coeffs = (imbedding.matrix * scale) @ concat.T
    return PureState(coeffs, space1=imbedding.codomain, space2=HilbertSpace(dim2))


def commutant_dimension(observables, tol: Tolerances = DEFAULT_TOL) -> int:
    """Complex dimension of the space of matrices commuting with all inputs.

    Stacks the linear maps X -> [X, B] and counts the null directions of
    the associated Gram matrix by eigendecomposition.
    """
    observables = list(observables)
    if not observables:
        raise ValueError("need at least one observable")
    n = observables[0].dim
    if any(obs.dim != n for obs in observables):
        raise DimensionMismatchError("observables act on spaces of different dimensions")

    eye = np.eye(n)
    gram = np.zeros((n * n, n * n), dtype=np.complex128)
    for obs in observables:
        b = obs.matrix
        # Row-major vec: vec(XB) = (I (x) B^T) vec(X), vec(BX) = (B (x) I) vec(X).
        op = np.kron(eye, b.T) - np.kron(b, eye)
        gram += op.conj().T @ op
    eigvals, _ = hermitian_eig(0.5 * (gram + gram.conj().T), tol)
    cutoff = tol.zero_threshold * (1.0 + float(eigvals[-1]))
    return int(np.sum(eigvals <= cutoff))


def commutant_is_scalar(observables, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether only scalar multiples of the identity commute with all inputs."""
    return commutant_dimension(observables, tol) == 1


def bijection_check(state: PureState, tol: Tolerances = DEFAULT_TOL) -> AntiunitaryImbedding:
    """Recover the unique imbedding of a maximally correlated unit state.

    For a state whose gram operator is the scalar 1/d on the whole
    second factor, the state equals d^{-1/2} sum_j (U e_j) (x) e_j for
    exactly one antiunitary imbedding U; its matrix in the standard
    bases is sqrt(d) times the coefficient matrix.
    """
    decomposition = schmidt_decompose(state, tol)
    d = state.space2.dim
    if (
        len(decomposition.lambdas) != 1
        or decomposition.kernel_dim != 0
        or abs(decomposition.lambdas[0] * d - 1.0) > 1e-8
    ):
        raise NotMaximalEprError(
            "gram operator is not the scalar 1/dim2: spectrum "
            f"{np.round(decomposition.lambdas, 6)} with multiplicities "
            f"{decomposition.multiplicities} and kernel dimension "
            f"{decomposition.kernel_dim}"
        )
    return AntiunitaryImbedding(
        np.sqrt(d) * state.coeffs, domain=state.space2, codomain=state.space1
    )
