import numpy as np
import pytest

from gnstools import (
    AlgebraElement,
    AlgebraShape,
    FaithfulState,
    build_gns,
    build_modular,
    commutant,
    gauge_commutant_distance,
    generating_unitaries,
    joint_commutant,
    lifted_gauge_unitary,
    modular_flow_residual,
    polar_decompose,
    random_element,
    random_unitary,
    represent,
    tomita_operator,
)
from gnstools.linalg import crandn, subspace_distance
from gnstools.modular import algebra_image_basis

from helpers import bruteforce_commutant, random_shape


def build_pair(state):
    rep = build_gns(state)
    return rep, build_modular(rep)


@pytest.fixture
def m2():
    shape = AlgebraShape([2])
    return build_pair(FaithfulState.from_spectra(shape, [[0.7, 0.3]]))


class TestTomitaOperator:
    def test_fixes_cyclic_vector(self, m2):
        rep, md = m2
        assert np.abs(md.s.apply(rep.omega) - rep.omega).max() < 1e-12

    def test_closed_form_on_normalized_units(self, m2):
        # S scales the (0,1) slot into the (1,0) slot by sqrt(l_0 / l_1)
        rep, md = m2
        e01 = np.zeros(4)
        e01[rep.basis_index(0, 0, 1)] = 1.0
        expected = np.zeros(4)
        expected[rep.basis_index(0, 1, 0)] = np.sqrt(0.7 / 0.3)
        assert np.abs(md.s.apply(e01) - expected).max() < 1e-12

    def test_antilinearity(self, m2, rng):
        rep, md = m2
        v = crandn(rng, 4)
        assert np.abs(md.s.apply(1j * v) + 1j * md.s.apply(v)).max() < 1e-12

    def test_square_is_identity(self, rng):
        shape = AlgebraShape([2, 3])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        assert np.abs(md.s.compose(md.s) - np.eye(rep.dim)).max() < 1e-10

    def test_implements_the_involution(self, rng):
        shape = AlgebraShape([3, 1])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        a = random_element(shape, rng)
        assert np.abs(md.s.apply(rep.vec(a)) - rep.vec(a.adjoint())).max() < 1e-11

    def test_adjoint_convention(self, rng):
        # <T* x, y> = <T y, x> for the antilinear adjoint
        shape = AlgebraShape([2, 2])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        for t in (md.s, md.j):
            x = crandn(rng, rep.dim)
            y = crandn(rng, rep.dim)
            lhs = np.vdot(t.adjoint().apply(x), y)
            rhs = np.vdot(t.apply(y), x)
            assert abs(lhs - rhs) < 1e-12


class TestPolarDecomposition:
    def test_m2_modular_spectrum(self, m2):
        # eigenvalues l_i / l_j of the modular operator: {1, 1, 7/3, 3/7}
        _, md = m2
        expected = np.sort([1.0, 1.0, 7.0 / 3.0, 3.0 / 7.0])
        np.testing.assert_allclose(np.sort(md.delta_eigenvalues), expected, atol=1e-12)

    def test_tracial_state_is_already_polar(self):
        n = 3
        shape = AlgebraShape([n])
        rep, md = build_pair(FaithfulState.from_spectra(shape, [[1.0 / n] * n]))
        assert np.abs(md.delta - np.eye(rep.dim)).max() < 1e-12
        for i in range(n):
            for j in range(n):
                e = np.zeros(rep.dim)
                e[rep.basis_index(0, i, j)] = 1.0
                out = md.j.apply(e)
                expected = np.zeros(rep.dim)
                expected[rep.basis_index(0, j, i)] = 1.0
                assert np.abs(out - expected).max() < 1e-12

    def test_swap_form_single_block(self, rng):
        # J exchanges the two tensor slots (with conjugation)
        shape = AlgebraShape([3])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        v = crandn(rng, rep.dim)
        swapped = v.reshape(3, 3).T.reshape(-1)
        assert np.abs(md.j.apply(v) - np.conj(swapped)).max() < 1e-11

    def test_modular_invariants(self, rng):
        for _ in range(8):
            shape = random_shape(rng, max_blocks=3, max_block=5, max_gns=60)
            rep, md = build_pair(FaithfulState.random(shape, rng))
            d = rep.dim
            eye = np.eye(d)
            assert np.abs(md.j.compose(md.j) - eye).max() < 1e-10
            assert np.abs(md.j.mat - md.j.adjoint().mat).max() < 1e-10
            assert np.abs(md.j.mat @ md.j.mat.conj().T - eye).max() < 1e-10
            assert float(md.delta_eigenvalues.min()) > 0.0
            recon = md.j.after_linear(md.delta_power(0.5))
            assert np.abs(md.s.mat - recon.mat).max() < 1e-9
            assert np.abs(md.j.apply(rep.omega) - rep.omega).max() < 1e-10
            assert np.abs(md.delta @ rep.omega - rep.omega).max() < 1e-10

    def test_conjugation_commutes_with_representation(self, rng):
        shape = AlgebraShape([2, 3])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        a = random_element(shape, rng)
        b = random_element(shape, rng)
        ja = md.j.sandwich(represent(rep, a))
        pb = represent(rep, b)
        assert np.abs(ja @ pb - pb @ ja).max() < 1e-10


class TestCommutant:
    def test_single_block_closed_form(self, rng):
        n = 3
        shape = AlgebraShape([n])
        rep, _ = build_pair(FaithfulState.random(shape, rng))
        basis = commutant(rep)
        closed = np.stack(
            [
                np.kron(np.eye(n), np.outer(np.eye(n)[i], np.eye(n)[j])).reshape(-1)
                / np.sqrt(n)
                for i in range(n)
                for j in range(n)
            ]
        )
        dist = subspace_distance(basis.reshape(basis.shape[0], -1), closed)
        assert dist < 1e-12

    def test_abelian_commutant_is_diagonal(self, rng):
        shape = AlgebraShape([1, 1, 1])
        rep, _ = build_pair(FaithfulState.random(shape, rng))
        basis = commutant(rep)
        assert basis.shape[0] == 3
        for b in basis:
            assert np.abs(b - np.diag(np.diagonal(b))).max() < 1e-12

    def test_dimension_formula(self, rng):
        for _ in range(6):
            shape = random_shape(rng, max_blocks=4, max_block=5, max_gns=60)
            rep, _ = build_pair(FaithfulState.random(shape, rng))
            assert commutant(rep).shape[0] == shape.algebra_dim

    def test_matches_bruteforce_nullspace(self, rng):
        for blocks in ([2], [2, 1], [1, 3], [2, 2]):
            shape = AlgebraShape(blocks)
            rep, _ = build_pair(FaithfulState.random(shape, rng))
            fast = commutant(rep)
            brute = bruteforce_commutant(rep)
            assert fast.shape == brute.shape
            dist = subspace_distance(
                fast.reshape(fast.shape[0], -1), brute.reshape(brute.shape[0], -1)
            )
            assert dist < 1e-10

    def test_mirror_of_algebra_spans_commutant(self, rng):
        for _ in range(4):
            shape = random_shape(rng, max_blocks=3, max_block=4, max_gns=40)
            rep, md = build_pair(FaithfulState.random(shape, rng))
            mirrored = np.stack(
                [
                    md.j.sandwich(represent(rep, u)).reshape(-1)
                    for _, u in rep.units.iter_units()
                ]
            )
            basis = md.commutant_basis
            dist = subspace_distance(mirrored, basis.reshape(basis.shape[0], -1))
            assert dist < 1e-9

    def test_elements_commute_with_representation(self, rng):
        shape = AlgebraShape([2, 3])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        a = random_element(shape, rng)
        pa = represent(rep, a)
        for b in md.commutant_basis:
            assert np.abs(b @ pa - pa @ b).max() < 1e-10


class TestModularFlow:
    def test_zero_time_is_exact(self, m2):
        rep, md = m2
        assert modular_flow_residual(md, rep, [0.0]) < 1e-12

    def test_tracial_flow_is_trivial(self):
        shape = AlgebraShape([3])
        rep, md = build_pair(FaithfulState.from_spectra(shape, [[1 / 3] * 3]))
        assert modular_flow_residual(md, rep, [0.7, 2.0]) < 1e-12

    def test_m2_flow_stays_in_the_algebra(self, m2):
        rep, md = m2
        assert modular_flow_residual(md, rep, [0.5, 1.0, np.pi]) < 1e-8

    def test_flow_conjugates_by_state_power(self, rng):
        # oracle: the flow acts as a -> R^{it} a R^{-it} inside the algebra
        shape = AlgebraShape([2, 2])
        state = FaithfulState.random(shape, rng)
        rep, md = build_pair(state)
        a = random_element(shape, rng)
        t = 0.8
        flowed = md.delta_power(1j * t) @ represent(rep, a) @ md.delta_power(-1j * t)
        blocks = []
        for r, n in enumerate(shape.blocks):
            v = state.eigenvectors[r]
            rt = v @ np.diag(state.eigenvalues[r] ** (1j * t)) @ v.conj().T
            blocks.append(rt @ a.blocks[r] @ rt.conj().T)
        expected = represent(rep, AlgebraElement(shape, blocks))
        assert np.abs(flowed - expected).max() < 1e-10


class TestGaugeCommutant:
    def test_abelian_generic_sample(self, rng):
        shape = AlgebraShape([1, 1])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        dist = gauge_commutant_distance(rep, md, sample_count=1, seed=5,
                                        include_generating=False)
        assert dist < 1e-10

    def test_single_block_recovers_algebra(self, rng):
        shape = AlgebraShape([2])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        dist = gauge_commutant_distance(rep, md, sample_count=4, seed=3)
        assert dist < 1e-10
        # structure: the joint commutant equals the image a tensor identity
        basis = joint_commutant(
            [lifted_gauge_unitary(rep, md, random_unitary(shape, s)) for s in range(4)]
        )
        dist2 = subspace_distance(
            basis.reshape(basis.shape[0], -1), algebra_image_basis(rep)
        )
        assert dist2 < 1e-10

    def test_identity_sample_does_not_generate(self, rng):
        shape = AlgebraShape([2, 1])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        lifted = lifted_gauge_unitary(rep, md, AlgebraElement.identity(shape))
        basis = joint_commutant([lifted])
        assert basis.shape[0] == rep.dim ** 2
        dist = subspace_distance(
            basis.reshape(basis.shape[0], -1), algebra_image_basis(rep)
        )
        assert dist == 1.0

    def test_generating_pair_alone_suffices(self, rng):
        shape = AlgebraShape([2, 2, 1])
        rep, md = build_pair(FaithfulState.random(shape, rng))
        for g in generating_unitaries(rep):
            assert g.unitarity_defect() < 1e-12
        dist = gauge_commutant_distance(rep, md, sample_count=0, seed=0)
        assert dist < 1e-9

    def test_random_instances(self, rng):
        for _ in range(3):
            shape = random_shape(rng, max_blocks=3, max_block=3, max_gns=20)
            rep, md = build_pair(FaithfulState.random(shape, rng))
            assert gauge_commutant_distance(rep, md, sample_count=8, seed=11) < 1e-8


class TestPolarErrors:
    def test_singular_operator_rejected(self):
        from gnstools import AntilinearOp
        from gnstools.errors import NumericalError

        with pytest.raises(NumericalError):
            polar_decompose(AntilinearOp(np.zeros((3, 3))))

    def test_tomita_then_polar_matches_build(self, rng):
        shape = AlgebraShape([2, 1])
        rep = build_gns(FaithfulState.random(shape, rng))
        md1 = polar_decompose(tomita_operator(rep), rep=rep)
        md2 = build_modular(rep)
        assert np.abs(md1.j.mat - md2.j.mat).max() < 1e-14
