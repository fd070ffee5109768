"""Schmidt structure, the commutation criterion, the predictive map, and
the constructive description of predicting states."""

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.optimize import minimize
from conftest import (
    group_close_values,
    random_hermitian,
    random_isometry,
    random_state_coeffs,
    random_unitary,
)
from sklearn.exceptions import NotFittedError

from eprstates.analysis import (
    AntiunitaryImbedding,
    EprAnalyzer,
    bijection_check,
    commutant_dimension,
    commutant_is_scalar,
    construct_epr_state,
    epr_algebra_contains,
    imbedded_conjugate,
    is_epr,
    predictive_map,
    schmidt_decompose,
)
from eprstates.errors import (
    BlocksNotOrthogonalError,
    NotInAlgebraError,
    NotIsometryError,
    NotMaximalEprError,
    WeightMismatchError,
    ZeroStateError,
)
from eprstates.measurement import min_off_graph_mass, joint_distribution
from eprstates.states import (
    HilbertSpace,
    Observable,
    PureState,
    maximal_state,
    product_state,
    singlet_state,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.diag([1.0, -1.0])
SINGLET_W = np.array([[0.0, 1.0], [-1.0, 0.0]])


def diagonal_weights_state(probabilities):
    """State with coefficient matrix diag(sqrt(p_i))."""
    return PureState(np.diag(np.sqrt(np.asarray(probabilities, dtype=float))))


def random_epr_instance(rng, d1, d2, max_blocks=3):
    """A predicting state built from random weights, blocks, and imbedding.

    Returns (state, block_frames, kernel_frame, weights) where
    block_frames are the orthonormal block bases in the second factor.
    """
    max_rank = min(d1, d2)
    n_blocks = int(rng.integers(1, min(max_blocks, max_rank) + 1))
    # Random block dimensions with total rank at most min(d1, d2).
    dims = []
    remaining = max_rank
    for j in range(n_blocks):
        left = n_blocks - j - 1
        high = remaining - left
        dim = int(rng.integers(1, high + 1)) if high > 1 else 1
        dims.append(dim)
        remaining -= dim
    rank = sum(dims)

    # Well separated weights normalized to sum(weights * dims) = 1.
    while True:
        raw = np.sort(rng.uniform(0.5, 2.0, size=n_blocks))[::-1]
        weights = raw / np.dot(raw, dims)
        if n_blocks == 1 or np.min(np.abs(np.diff(weights))) > 1e-3:
            break

    frame2 = random_unitary(rng, d2)
    blocks = []
    start = 0
    for dim in dims:
        blocks.append(frame2[:, start:start + dim])
        start += dim
    kernel = frame2[:, rank:]
    imbedding = AntiunitaryImbedding(
        random_isometry(rng, d1, rank), HilbertSpace(rank), HilbertSpace(d1)
    )
    state = construct_epr_state(weights, blocks, imbedding)
    return state, blocks, kernel, weights


def block_commuting_observable(rng, blocks, kernel, diagonal=False, spread=3.0):
    """Hermitian matrix preserving every block and the kernel."""
    d2 = blocks[0].shape[0]
    matrix = np.zeros((d2, d2), dtype=np.complex128)
    for frame in list(blocks) + ([kernel] if kernel.shape[1] else []):
        k = frame.shape[1]
        if diagonal:
            local = np.diag(rng.uniform(-spread, spread, size=k))
        else:
            local = random_hermitian(rng, k)
        matrix += frame @ local @ frame.conj().T
    return 0.5 * (matrix + matrix.conj().T)


class TestSchmidtDecompose:
    def test_singlet(self):
        dec = schmidt_decompose(singlet_state())
        assert np.allclose(dec.lambdas, [0.5])
        assert dec.multiplicities == (2,)
        assert dec.kernel_dim == 0

    def test_two_unequal_weights(self):
        dec = schmidt_decompose(diagonal_weights_state([0.9, 0.1]))
        assert np.allclose(dec.lambdas, [0.9, 0.1], atol=1e-12)
        assert dec.multiplicities == (1, 1)

    def test_maximally_correlated(self):
        dec = schmidt_decompose(maximal_state(4))
        assert np.allclose(dec.lambdas, [0.25])
        assert dec.multiplicities == (4,)
        assert dec.is_maximal()

    def test_zero_state_rejected(self):
        with pytest.raises(ZeroStateError):
            schmidt_decompose(PureState(np.zeros((2, 2))))

    def test_structural_invariants(self, rng):
        for _ in range(15):
            d1 = int(rng.integers(1, 9))
            d2 = int(rng.integers(1, 9))
            state = PureState(random_state_coeffs(rng, d1, d2, normalized=False))
            dec = schmidt_decompose(state)

            # Spectral weights account for the squared norm.
            assert abs(dec.total_weight() - state.norm_squared()) < 1e-10 * (
                1.0 + state.norm_squared()
            )

            # Blocks plus kernel form an orthonormal basis of the second factor.
            full = np.hstack([dec.block_matrix, dec.kernel_basis])
            assert np.linalg.norm(full.conj().T @ full - np.eye(d2)) < 1e-10

            # On each block the canonical map is sqrt(lambda) times the imbedding.
            offset = 0
            for lam, block in zip(dec.lambdas, dec.h2_blocks):
                k = block.shape[1]
                w_cols = dec.imbedding.matrix[:, offset:offset + k]
                image = state.coeffs @ np.conj(block)
                assert np.linalg.norm(image - np.sqrt(lam) * w_cols) < 1e-9
                offset += k

            # Images of distinct blocks are mutually orthogonal.
            images = [state.coeffs @ np.conj(b) for b in dec.h2_blocks]
            for i in range(len(images)):
                for j in range(i + 1, len(images)):
                    assert np.linalg.norm(images[i].conj().T @ images[j]) < 1e-9


class TestCommutationCriterion:
    def test_singlet_accepts_any_observable(self, rng):
        state = singlet_state()
        observables = [Observable(random_hermitian(rng, 2)) for _ in range(5)]
        report = is_epr(state, observables)
        assert report.is_epr
        assert all(v.passed for v in report.per_observable)

    def test_product_state_rejects_mismatched_observable(self):
        report = is_epr(product_state([1.0, 0.0], [1.0, 0.0]), [Observable(PAULI_X)])
        assert not report.is_epr
        assert report.per_observable[0].commutator_norm > 0.1

    def test_identity_always_accepted(self, rng):
        state = PureState(random_state_coeffs(rng, 3, 3))
        assert is_epr(state, [Observable(np.eye(3))]).is_epr

    def test_membership_scalar_gram(self, rng):
        state = maximal_state(3)
        assert epr_algebra_contains(state, Observable(random_hermitian(rng, 3)))

    def test_membership_diagonal_cases(self):
        state = diagonal_weights_state([0.9, 0.1])
        assert epr_algebra_contains(state, Observable(np.diag([2.0, 5.0])))
        assert not epr_algebra_contains(state, Observable(PAULI_X))


class TestPredictiveMap:
    def test_singlet_spin_z(self):
        partner = predictive_map(singlet_state(), Observable(PAULI_Z))
        assert np.allclose(partner.matrix, np.diag([-1.0, 1.0]), atol=1e-12)

    def test_identity_maps_to_support_projector(self):
        # Kernel present: third basis direction of the second factor unused.
        state = PureState(np.diag(np.sqrt([0.5, 0.5, 0.0]))[:3, :3])
        partner = predictive_map(state, Observable(np.eye(3)))
        assert np.allclose(partner.matrix, np.diag([1.0, 1.0, 0.0]), atol=1e-10)

    def test_rejects_noncommuting_observable(self):
        with pytest.raises(NotInAlgebraError):
            predictive_map(diagonal_weights_state([0.9, 0.1]), Observable(PAULI_X))

    def test_antilinearity_on_commuting_diagonal_pair(self, rng):
        state, blocks, kernel, _ = random_epr_instance(rng, 6, 5)
        analyzer = EprAnalyzer().fit(state)
        first = block_commuting_observable(rng, blocks, kernel, diagonal=True)
        second = block_commuting_observable(rng, blocks, kernel, diagonal=True)
        combined = analyzer.predict_matrix(1j * first + second)
        expected = -1j * analyzer.predict_matrix(first) + analyzer.predict_matrix(second)
        assert np.linalg.norm(combined - expected) < 1e-9

    def test_multiplicativity_on_commuting_pairs(self, rng):
        for _ in range(5):
            state, blocks, kernel, _ = random_epr_instance(rng, 7, 6)
            analyzer = EprAnalyzer().fit(state)
            first = block_commuting_observable(rng, blocks, kernel, diagonal=True)
            second = block_commuting_observable(rng, blocks, kernel, diagonal=True)
            assert np.linalg.norm(first @ second - second @ first) < 1e-12
            product_image = analyzer.predict_matrix(first @ second)
            image_product = analyzer.predict_matrix(first) @ analyzer.predict_matrix(second)
            assert np.linalg.norm(product_image - image_product) < 1e-9

    def test_spectrum_preserved_on_support(self, rng):
        for _ in range(5):
            state, blocks, kernel, _ = random_epr_instance(rng, 8, 6)
            analyzer = EprAnalyzer().fit(state)
            matrix = block_commuting_observable(rng, blocks, kernel)
            partner = analyzer.predict(Observable(matrix))
            frame = np.hstack(blocks)
            compressed = frame.conj().T @ matrix @ frame
            restricted = analyzer.decomposition_.imbedding.matrix.conj().T @ partner.matrix \
                @ analyzer.decomposition_.imbedding.matrix
            assert np.allclose(
                np.linalg.eigvalsh(restricted),
                np.linalg.eigvalsh(compressed),
                atol=1e-9,
            )

    def test_kernel_observables_predict_zero(self):
        # Observable supported where the state has no weight: its partner
        # vanishes and its distribution is the point mass at zero.
        state = PureState(np.diag(np.sqrt([0.5, 0.5, 0.0])))
        supported_on_kernel = Observable(np.diag([0.0, 0.0, 5.0]))
        partner = predictive_map(state, supported_on_kernel)
        assert np.linalg.norm(partner.matrix) < 1e-12
        from eprstates.measurement import observable_distribution

        values, probs = observable_distribution(state, supported_on_kernel)
        mass_at_zero = sum(p for v, p in zip(values, probs) if abs(v) < 1e-9)
        assert mass_at_zero == pytest.approx(1.0, abs=1e-12)

    def test_support_concentration_of_commutant_observables(self, rng):
        # Distribution of a commuting observable lives on its spectrum
        # over the occupied subspace.
        from eprstates.measurement import observable_distribution

        for _ in range(5):
            state, blocks, kernel, _ = random_epr_instance(rng, 6, 6)
            matrix = block_commuting_observable(rng, blocks, kernel)
            frame = np.hstack(blocks)
            support_spectrum = np.linalg.eigvalsh(frame.conj().T @ matrix @ frame)
            values, probs = observable_distribution(state, Observable(matrix))
            on_support = sum(
                p
                for v, p in zip(values, probs)
                if np.min(np.abs(support_spectrum - v)) <= 1e-8 * (1.0 + abs(v))
            )
            assert on_support >= 1.0 - 1e-9


class TestConstruction:
    def test_reproduces_singlet(self):
        imbedding = AntiunitaryImbedding(SINGLET_W)
        state = construct_epr_state([0.5], [np.eye(2)], imbedding)
        assert np.allclose(state.coeffs, singlet_state().coeffs, atol=1e-15)

    def test_two_singleton_blocks(self):
        imbedding = AntiunitaryImbedding(np.eye(2))
        blocks = [np.eye(2)[:, :1], np.eye(2)[:, 1:]]
        state = construct_epr_state([0.9, 0.1], blocks, imbedding)
        assert np.allclose(state.coeffs, np.diag(np.sqrt([0.9, 0.1])), atol=1e-15)

    def test_maximal_three_level(self):
        state = construct_epr_state([1.0 / 3.0], [np.eye(3)], AntiunitaryImbedding(np.eye(3)))
        assert np.allclose(state.coeffs, np.eye(3) / np.sqrt(3.0), atol=1e-15)

    def test_weight_mismatch(self):
        with pytest.raises(WeightMismatchError):
            construct_epr_state([0.3], [np.eye(2)], AntiunitaryImbedding(np.eye(2)))

    def test_blocks_must_be_orthogonal(self):
        overlapping = [np.eye(2)[:, :1], np.eye(2)[:, :1]]
        with pytest.raises(BlocksNotOrthogonalError):
            construct_epr_state([0.5, 0.5], overlapping, AntiunitaryImbedding(np.eye(2)))

    def test_imbedding_must_be_isometry(self):
        with pytest.raises(NotIsometryError):
            AntiunitaryImbedding(2.0 * np.eye(2))

    def test_constructed_states_pass_the_criterion(self, rng):
        # Forward half of the criterion, randomized over weights, blocks,
        # imbeddings, and dimensions.
        for _ in range(20):
            d2 = int(rng.integers(2, 9))
            d1 = int(rng.integers(d2, 13))
            state, blocks, kernel, weights = random_epr_instance(rng, d1, d2)
            assert state.is_normalized(1e-10)
            observables = [
                Observable(block_commuting_observable(rng, blocks, kernel))
                for _ in range(3)
            ]
            report = is_epr(state, observables)
            assert report.is_epr
            assert max(v.commutator_norm for v in report.per_observable) < 1e-9

            recovered = schmidt_decompose(state)
            assert np.allclose(np.sort(recovered.lambdas), np.sort(weights), atol=1e-9)


def counterexample_pair(theta=0.3, alpha=0.5):
    """A two-level state with unequal weights and a rotated observable.

    The commutation test fails and no first-factor observable can
    predict the rotated one: analytic off-graph mass for the imbedded
    candidate is 2 sin^2(alpha) cos^2(alpha) (cos(theta) - sin(theta))^2.
    """
    state = PureState(np.diag([np.cos(theta), np.sin(theta)]))
    rotation = np.array(
        [[np.cos(alpha), -np.sin(alpha)], [np.sin(alpha), np.cos(alpha)]]
    )
    observable = Observable(rotation @ PAULI_Z @ rotation.T)
    return state, observable


class TestCriterionConverse:
    def test_candidate_partner_leaves_mass_off_graph(self):
        state, observable = counterexample_pair()
        assert not epr_algebra_contains(state, observable)
        dec = schmidt_decompose(state)
        candidate = Observable(imbedded_conjugate(dec, observable.matrix))
        joint = joint_distribution(state, candidate, observable)
        expected = (
            2.0
            * (np.sin(0.5) * np.cos(0.5) * (np.cos(0.3) - np.sin(0.3))) ** 2
        )
        assert min_off_graph_mass(joint) == pytest.approx(expected, abs=1e-12)
        assert min_off_graph_mass(joint) > 1e-3

    def test_no_observable_predicts_a_noncommuting_one(self, rng):
        # Brute-force oracle: minimize the off-graph mass over all
        # first-factor observables with distinct eigenvalues (finest
        # spectral partitions; coarser ones only increase the mass).
        state, observable = counterexample_pair()
        coeffs = state.coeffs
        d1 = coeffs.shape[0]

        b_vals, b_vecs = np.linalg.eigh(observable.matrix)
        b_frames = [b_vecs[:, idx] for idx in group_close_values(b_vals)]

        def unpack(params):
            h = np.zeros((d1, d1), dtype=np.complex128)
            h[np.diag_indices(d1)] = params[:d1]
            k = d1
            for i in range(d1):
                for j in range(i + 1, d1):
                    h[i, j] = params[k] + 1j * params[k + 1]
                    h[j, i] = params[k] - 1j * params[k + 1]
                    k += 2
            return expm(1j * h)

        def off_graph(params):
            frame1 = unpack(params)
            total = 0.0
            for a in range(d1):
                row = np.array(
                    [
                        np.linalg.norm(frame1[:, a].conj() @ coeffs @ np.conj(fb)) ** 2
                        for fb in b_frames
                    ]
                )
                total += row.sum() - row.max()
            return total

        best = np.inf
        for _ in range(4):
            start = rng.standard_normal(d1 * d1)
            result = minimize(off_graph, start, method="Powell",
                              options={"maxiter": 300, "xtol": 1e-8})
            best = min(best, float(result.fun))
        assert best > 1e-3


class TestCommutant:
    def test_pauli_pair_is_irreducible(self):
        assert commutant_is_scalar([Observable(PAULI_X), Observable(PAULI_Z)])

    def test_single_diagonal_is_not(self):
        assert not commutant_is_scalar([Observable(PAULI_Z)])
        assert commutant_dimension([Observable(PAULI_Z)]) == 2

    def test_spin_pair_commutant_is_full_matrix_algebra(self):
        # Position and momentum acting on the motion factor only: the
        # commutant is everything on the spin factor.
        from eprstates.groups import FiniteAbelianGroup, spin_observables

        group = FiniteAbelianGroup((3,))
        position, momentum = spin_observables(group, 2)
        assert not commutant_is_scalar([position, momentum])
        assert commutant_dimension([position, momentum]) == 4


class TestBijection:
    def test_identity_imbedding(self):
        recovered = bijection_check(maximal_state(2))
        assert np.allclose(recovered.matrix, np.eye(2), atol=1e-12)

    def test_singlet_imbedding(self):
        recovered = bijection_check(singlet_state())
        assert np.allclose(recovered.matrix, SINGLET_W, atol=1e-12)

    def test_unequal_weights_rejected(self):
        with pytest.raises(NotMaximalEprError):
            bijection_check(diagonal_weights_state([0.9, 0.1]))

    def test_round_trip(self, rng):
        for d in (2, 3, 4, 8):
            w = random_unitary(rng, d)
            state = construct_epr_state(
                [1.0 / d], [np.eye(d)], AntiunitaryImbedding(w)
            )
            recovered = bijection_check(state)
            assert np.linalg.norm(recovered.matrix - w) < 1e-10
            rebuilt = construct_epr_state(
                [1.0 / d], [np.eye(d)], AntiunitaryImbedding(recovered.matrix)
            )
            assert np.linalg.norm(rebuilt.coeffs - state.coeffs) < 1e-10


class TestAnalyzerEstimator:
    def test_params_round_trip(self):
        analyzer = EprAnalyzer(commutator_tol=1e-7)
        params = analyzer.get_params()
        assert params["commutator_tol"] == 1e-7
        analyzer.set_params(eigen_cluster=1e-6)
        assert analyzer.eigen_cluster == 1e-6

    def test_requires_fit(self):
        with pytest.raises(NotFittedError):
            EprAnalyzer().contains(Observable(PAULI_Z))

    def test_fit_returns_self_and_exposes_spectrum(self):
        analyzer = EprAnalyzer()
        assert analyzer.fit(singlet_state()) is analyzer
        assert np.allclose(analyzer.lambdas_, [0.5])
        assert analyzer.multiplicities_ == (2,)
