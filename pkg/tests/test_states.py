"""The state <-> conjugate-linear-map correspondence and its invariants."""

import numpy as np
import pytest
from conftest import random_state_coeffs, random_unitary

from eprstates.errors import InvariantError, NotHermitianError, ShapeMismatchError
from eprstates.states import (
    ConjugateLinearMap,
    HilbertSpace,
    Observable,
    PureState,
    adjoint,
    apply_conjugate_linear,
    canonical_map,
    gram,
    gram_matrix,
    inner,
    inverse_canonical,
    product_state,
    singlet_state,
    state_norm_identity,
)

SINGLET_MATRIX = np.array([[0.0, 1.0], [-1.0, 0.0]]) / np.sqrt(2.0)


def reassemble(coeffs, basis, conjugate_linear=True):
    """Oracle: rebuild the coefficient matrix of sum_m (L f_m) (x) f_m.

    ``basis`` holds an orthonormal basis of the second factor in its
    columns.  With the conjugate-linear action L u = A conj(u) the
    result must reproduce A for every basis; with the linear action it
    must not.
    """
    total = np.zeros_like(coeffs)
    for m in range(basis.shape[1]):
        f = basis[:, m]
        image = coeffs @ np.conj(f) if conjugate_linear else coeffs @ f
        total += np.outer(image, f)
    return total


class TestSpacesAndStates:
    def test_space_requires_positive_dim(self):
        with pytest.raises(InvariantError):
            HilbertSpace(0)

    def test_space_rejects_duplicate_labels(self):
        with pytest.raises(InvariantError):
            HilbertSpace(2, labels=("a", "a"))

    def test_state_rejects_nan(self):
        with pytest.raises(InvariantError):
            PureState([[np.nan, 0.0], [0.0, 0.0]])

    def test_state_norm_and_normalization(self):
        state = PureState([[3.0, 0.0], [0.0, 4.0]])
        assert state.norm() == pytest.approx(5.0)
        assert not state.is_normalized()
        assert state.normalized().is_normalized()


class TestCanonicalMap:
    def test_product_state(self):
        state = product_state([1.0, 0.0], [1.0, 0.0])
        assert np.array_equal(canonical_map(state).matrix, [[1.0, 0.0], [0.0, 0.0]])

    def test_singlet_coefficients(self):
        cmap = canonical_map(singlet_state())
        assert np.allclose(cmap.matrix, SINGLET_MATRIX, atol=1e-15)

    def test_basis_independence(self, rng):
        # Re-expanding over any other orthonormal basis of the second
        # factor reproduces the same coefficient matrix.
        for _ in range(10):
            d1, d2 = rng.integers(1, 9, size=2)
            coeffs = random_state_coeffs(rng, d1, d2, normalized=False)
            basis = random_unitary(rng, d2)
            assert np.linalg.norm(reassemble(coeffs, basis) - coeffs) < 1e-10

    def test_linear_variant_is_basis_dependent(self, rng):
        # Guard for why the conjugate-linear choice is the canonical one:
        # the linear map with the same basis action changes under rotation.
        coeffs = random_state_coeffs(rng, 4, 4, normalized=False)
        basis = random_unitary(rng, 4)
        assert np.linalg.norm(reassemble(coeffs, basis, conjugate_linear=False) - coeffs) > 1e-6


class TestInverseCanonical:
    def test_round_trip_is_exact(self, rng):
        for _ in range(10):
            state = PureState(random_state_coeffs(rng, 3, 5, normalized=False))
            again = inverse_canonical(canonical_map(state))
            assert np.array_equal(again.coeffs, state.coeffs)

    def test_diagonal_map(self):
        state = inverse_canonical(ConjugateLinearMap(np.eye(2) / np.sqrt(2.0)))
        assert np.allclose(state.coeffs, np.eye(2) / np.sqrt(2.0))
        assert state.is_normalized()


class TestAdjoint:
    def test_plain_transpose(self):
        cmap = ConjugateLinearMap([[0.0, 1.0], [0.0, 0.0]])
        assert np.array_equal(adjoint(cmap).matrix, [[0.0, 0.0], [1.0, 0.0]])

    def test_symmetric_real_matrix_fixed(self):
        matrix = np.array([[1.0, 2.0], [2.0, 3.0]])
        assert np.array_equal(adjoint(ConjugateLinearMap(matrix)).matrix, matrix)

    def test_involution_is_exact(self, rng):
        cmap = ConjugateLinearMap(random_state_coeffs(rng, 4, 6, normalized=False))
        assert np.array_equal(adjoint(adjoint(cmap)).matrix, cmap.matrix)

    def test_defining_relation_sampled(self, rng):
        # (L u, v) = (L† v, u) for the scalar product linear in the
        # first argument.
        cmap = ConjugateLinearMap(random_state_coeffs(rng, 3, 4, normalized=False))
        adj = adjoint(cmap)
        for _ in range(100):
            u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            lhs = inner(cmap(u), v)
            rhs = inner(adj(v), u)
            assert abs(lhs - rhs) < 1e-12


class TestGram:
    def test_singlet_gram_is_half_identity(self):
        g = gram_matrix(canonical_map(singlet_state()))
        assert np.allclose(g, np.eye(2) / 2.0, atol=1e-15)

    def test_product_state_gram_is_rank_one(self):
        g = gram_matrix(canonical_map(product_state([1.0, 0.0], [1.0, 0.0])))
        assert np.allclose(g, np.diag([1.0, 0.0]))

    def test_gram_hermitian_psd_with_trace_identity(self, rng):
        for _ in range(10):
            matrix = random_state_coeffs(rng, 5, 3, normalized=False)
            cmap = ConjugateLinearMap(matrix)
            obs = gram(cmap)
            assert np.linalg.norm(obs.matrix - obs.matrix.conj().T) < 1e-12
            assert np.all(obs.eigenvalues >= -1e-12)
            assert np.trace(obs.matrix).real == pytest.approx(
                np.linalg.norm(matrix) ** 2, abs=1e-12
            )


class TestNormIdentity:
    def test_singlet(self):
        lhs, rhs = state_norm_identity(singlet_state())
        assert lhs == pytest.approx(1.0, abs=1e-12)
        assert rhs == pytest.approx(1.0, abs=1e-12)

    def test_zero_state(self):
        lhs, rhs = state_norm_identity(PureState(np.zeros((2, 2))))
        assert (lhs, rhs) == (0.0, 0.0)

    def test_random_unnormalized(self, rng):
        for _ in range(20):
            state = PureState(3.0 * random_state_coeffs(rng, 4, 4, normalized=False))
            lhs, rhs = state_norm_identity(state)
            assert abs(lhs - rhs) <= 1e-12 * (1.0 + lhs)


class TestApplication:
    def test_conjugation_map(self):
        cmap = ConjugateLinearMap(np.eye(2))
        assert np.allclose(cmap(np.array([1j, 0.0])), [-1j, 0.0])

    def test_singlet_first_column(self):
        cmap = canonical_map(singlet_state())
        assert np.allclose(cmap(np.array([1.0, 0.0])), [0.0, -1.0 / np.sqrt(2.0)])

    def test_antilinearity(self, rng):
        cmap = ConjugateLinearMap(random_state_coeffs(rng, 3, 3))
        u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert np.allclose(cmap(1j * u), -1j * cmap(u), atol=1e-14)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            apply_conjugate_linear(ConjugateLinearMap(np.eye(2)), np.zeros(3))


class TestObservable:
    def test_rejects_nonhermitian(self):
        with pytest.raises(NotHermitianError):
            Observable([[0.0, 1.0], [0.0, 0.0]])

    def test_spectral_blocks_resolve_identity(self, rng):
        for _ in range(5):
            n = int(rng.integers(2, 8))
            raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            obs = Observable(raw + raw.conj().T)
            resolution = sum(obs.projector(k) for k in range(len(obs.values)))
            assert np.linalg.norm(resolution - np.eye(n)) < 1e-10
            for k in range(len(obs.values)):
                for l in range(k + 1, len(obs.values)):
                    overlap = obs.blocks[k].conj().T @ obs.blocks[l]
                    assert np.linalg.norm(overlap) < 1e-10

    def test_degenerate_spectrum_clusters(self):
        obs = Observable(np.diag([1.0, 1.0 + 1e-12, 2.0]))
        assert len(obs.values) == 2
        assert obs.multiplicity(0) == 2
