import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnstools import (
    AlgebraElement,
    AlgebraShape,
    FaithfulState,
    NotFaithfulError,
    ShapeMismatchError,
    canonical_matrix_units,
    random_element,
    random_unitary,
)

from helpers import random_shape


def diag_state(*lams):
    shape = AlgebraShape([len(lams)])
    return FaithfulState.from_spectra(shape, [list(lams)])


class TestShape:
    def test_dimensions(self):
        shape = AlgebraShape([2, 1])
        assert shape.algebra_dim == 5
        assert shape.gns_dim == 5
        assert shape.num_blocks == 2
        assert shape.offsets() == (0, 4)

    def test_index_is_row_major(self):
        shape = AlgebraShape([3, 2])
        assert shape.index(0, 1, 2) == 5
        assert shape.index(1, 1, 0) == 9 + 2

    def test_rejects_bad_blocks(self):
        with pytest.raises(ValueError):
            AlgebraShape([])
        with pytest.raises(ValueError):
            AlgebraShape([2, 0])


class TestArithmetic:
    def test_identity_is_neutral(self, rng):
        shape = AlgebraShape([2, 1])
        a = random_element(shape, rng)
        assert (AlgebraElement.identity(shape) @ a - a).norm() < 1e-14

    def test_involution(self, rng):
        shape = AlgebraShape([2, 1])
        a = random_element(shape, rng)
        assert (a.adjoint().adjoint() - a).norm() == 0.0

    def test_unit_product_rule(self):
        # e_01 e_10 = e_00 in a single 2x2 block
        state = diag_state(0.7, 0.3)
        units = canonical_matrix_units(state)
        prod = units.unit(0, 0, 1) @ units.unit(0, 1, 0)
        assert (prod - units.unit(0, 0, 0)).norm() < 1e-14

    def test_shape_mismatch_rejected(self, rng):
        a = random_element(AlgebraShape([2]), rng)
        b = random_element(AlgebraShape([2, 1]), rng)
        with pytest.raises(ShapeMismatchError):
            a @ b

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_trace_is_cyclic(self, seed):
        rng = np.random.default_rng(seed)
        shape = random_shape(rng, max_blocks=3, max_block=4, max_gns=30)
        a = random_element(shape, rng)
        b = random_element(shape, rng)
        assert abs((a @ b).trace() - (b @ a).trace()) < 1e-10

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_adjoint_reverses_products(self, seed):
        rng = np.random.default_rng(seed)
        shape = random_shape(rng, max_blocks=3, max_block=4, max_gns=30)
        a = random_element(shape, rng)
        b = random_element(shape, rng)
        assert ((a @ b).adjoint() - b.adjoint() @ a.adjoint()).norm() < 1e-10


class TestTrace:
    def test_identity_trace_counts_dimensions(self):
        assert AlgebraElement.identity(AlgebraShape([2, 1])).trace() == 3

    def test_state_is_normalized(self):
        state = diag_state(0.7, 0.3)
        assert abs(state.density.trace() - 1) < 1e-14

    def test_offdiagonal_unit_is_traceless(self):
        units = canonical_matrix_units(diag_state(0.7, 0.3))
        assert abs(units.unit(0, 0, 1).trace()) < 1e-14


class TestFaithfulState:
    def test_rejects_nonpositive(self):
        shape = AlgebraShape([2])
        with pytest.raises(NotFaithfulError):
            FaithfulState(AlgebraElement(shape, [np.diag([1.0, 0.0])]))

    def test_rejects_wrong_trace(self):
        shape = AlgebraShape([2])
        with pytest.raises(ValueError):
            FaithfulState(AlgebraElement(shape, [np.diag([0.7, 0.4])]))

    def test_rejects_non_hermitian(self):
        shape = AlgebraShape([2])
        with pytest.raises(ValueError):
            FaithfulState(AlgebraElement(shape, [np.array([[0.7, 0.1], [0.0, 0.3]])]))

    def test_expectation_of_units(self):
        # omega(e_ij) = delta_ij lambda_i
        state = diag_state(0.7, 0.3)
        units = canonical_matrix_units(state)
        assert abs(state.expect(units.unit(0, 0, 0)) - 0.7) < 1e-14
        assert abs(state.expect(units.unit(0, 1, 1)) - 0.3) < 1e-14
        assert abs(state.expect(units.unit(0, 0, 1))) < 1e-14

    def test_random_states_are_faithful_and_normalized(self, rng):
        for _ in range(25):
            shape = random_shape(rng, max_blocks=4, max_block=6, max_gns=80)
            state = FaithfulState.random(shape, rng)
            assert abs(state.density.trace() - 1) < 1e-12
            assert min(w.min() for w in state.eigenvalues) > 1e-6


class TestCanonicalUnits:
    def test_diagonal_state_gives_standard_units(self):
        units = canonical_matrix_units(diag_state(0.7, 0.3))
        expected = np.zeros((2, 2))
        expected[0, 1] = 1.0
        assert np.abs(units.unit(0, 0, 1).blocks[0] - expected).max() < 1e-14

    def test_rotated_state_gives_rotated_units(self):
        # R = [[0.5, 0.2], [0.2, 0.5]] has eigenpairs (0.7, [1,1]/sqrt2) and
        # (0.3, [1,-1]/sqrt2); units follow by forming v_i v_j^dag by hand.
        shape = AlgebraShape([2])
        state = FaithfulState(
            AlgebraElement(shape, [np.array([[0.5, 0.2], [0.2, 0.5]])])
        )
        units = canonical_matrix_units(state)
        e00 = 0.5 * np.array([[1, 1], [1, 1]])
        e01 = 0.5 * np.array([[1, -1], [1, -1]])
        assert np.abs(units.unit(0, 0, 0).blocks[0] - e00).max() < 1e-12
        assert np.abs(units.unit(0, 0, 1).blocks[0] - e01).max() < 1e-12

    def test_abelian_units_are_block_identities(self):
        shape = AlgebraShape([1, 1])
        state = FaithfulState.from_spectra(shape, [[0.25], [0.75]])
        units = canonical_matrix_units(state)
        assert (units.unit(0, 0, 0) - units.block_identity(0)).norm() < 1e-14
        assert (units.unit(1, 0, 0) - units.block_identity(1)).norm() < 1e-14

    def test_unit_relations_hold_exactly(self, rng):
        for blocks in ([2], [2, 1], [3, 2], [1, 1, 1]):
            shape = AlgebraShape(blocks)
            state = FaithfulState.random(shape, rng)
            units = canonical_matrix_units(state)
            idx = list(units.iter_indices())
            for (r, i, j) in idx:
                for (s, k, l) in idx:
                    prod = units.unit(r, i, j) @ units.unit(s, k, l)
                    if r == s and j == k:
                        expected = units.unit(r, i, l)
                    else:
                        expected = AlgebraElement.zeros(shape)
                    assert (prod - expected).norm() < 1e-12
            for (r, i, j) in idx:
                assert (units.unit(r, i, j).adjoint() - units.unit(r, j, i)).norm() < 1e-12
            for r in range(shape.num_blocks):
                total = AlgebraElement.zeros(shape)
                for i in range(shape.blocks[r]):
                    total = total + units.unit(r, i, i)
                assert (total - units.block_identity(r)).norm() < 1e-12

    def test_state_reconstructs_from_units(self, rng):
        shape = AlgebraShape([3, 2])
        state = FaithfulState.random(shape, rng)
        units = canonical_matrix_units(state)
        rebuilt = AlgebraElement.zeros(shape)
        for r, n in enumerate(shape.blocks):
            for i in range(n):
                rebuilt = rebuilt + state.eigenvalues[r][i] * units.unit(r, i, i)
        assert (rebuilt - state.density).norm() < 1e-12


class TestRandomUnitary:
    def test_unitarity(self):
        shape = AlgebraShape([3, 2, 1])
        for seed in range(5):
            g = random_unitary(shape, seed)
            assert g.unitarity_defect() < 1e-12

    def test_determinism(self):
        shape = AlgebraShape([3, 2])
        g1 = random_unitary(shape, 42)
        g2 = random_unitary(shape, 42)
        assert (g1 - g2).norm() == 0.0

    def test_abelian_unitaries_are_phases(self):
        shape = AlgebraShape([1, 1, 1])
        g = random_unitary(shape, 9)
        for b in g.blocks:
            assert abs(abs(b[0, 0]) - 1.0) < 1e-12
