import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boundent.tensor import (
    DependentInputError,
    DensityMatrix,
    Ket,
    OrthogonalProjectionError,
    OrthonormalBasis,
    Projector,
    canonical_phase,
    eigvals_hermitian,
    ket_from_pairs,
    ket_to_pairs,
    orthonormalize,
    partial_trace,
    partial_transpose,
    permute_parties,
    project_onto,
    tensor_product,
)
from boundent.upb import optimal_product_states, q_basis, reference_state, shifts_upb

from conftest import random_ket_array

ZERO = Ket(np.array([1, 0], dtype=complex))
ONE = Ket(np.array([0, 1], dtype=complex))
PLUS = Ket(np.array([1, 1], dtype=complex) / np.sqrt(2))
MINUS = Ket(np.array([1, -1], dtype=complex) / np.sqrt(2))


def kets(n_parties=3):
    dim = 2**n_parties
    return st.lists(
        st.tuples(
            st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False)
        ),
        min_size=dim,
        max_size=dim,
    ).map(
        lambda pairs: np.array([complex(re, im) for re, im in pairs])
    ).filter(lambda v: np.linalg.norm(v) > 1e-3).map(Ket.normalized)


class TestKet:
    def test_rejects_non_unit_norm(self):
        with pytest.raises(ValueError, match="norm"):
            Ket(np.array([1.0, 1.0]))

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError, match="dimension"):
            Ket(np.array([1.0, 0, 0]))
        with pytest.raises(ValueError, match="dimension"):
            Ket.normalized(np.ones(16))

    def test_normalized_constructor(self):
        k = Ket.normalized(np.array([3.0, 4.0]))
        assert np.allclose(k.amplitudes, [0.6, 0.8])

    def test_amplitudes_frozen(self):
        k = Ket(np.array([1.0, 0]))
        with pytest.raises(ValueError):
            k.amplitudes[0] = 0

    @given(kets(2))
    @settings(max_examples=60, deadline=None)
    def test_canonical_first_significant_positive(self, k):
        canon = k.canonical().amplitudes
        lead = canon[np.abs(canon) > 1e-12][0]
        assert abs(lead.imag) < 1e-14 and lead.real > 0

    def test_isclose_ignores_global_phase(self):
        k = Ket.normalized(np.array([1.0, 1j]))
        assert k.isclose(Ket(np.exp(0.7j) * k.amplitudes))


class TestTensorProduct:
    def test_basis_identity_case(self):
        out = tensor_product([ZERO, ZERO, ZERO])
        expected = np.zeros(8)
        expected[0] = 1
        assert np.array_equal(out.amplitudes, expected)

    def test_direct_expansion(self):
        # |1,+,-> = (e4 - e5 + e6 - e7) / 2
        out = tensor_product([ONE, PLUS, MINUS])
        expected = np.zeros(8)
        expected[4], expected[5], expected[6], expected[7] = 0.5, -0.5, 0.5, -0.5
        assert np.allclose(out.amplitudes, expected, atol=1e-15)

    def test_norm_multiplicativity_bulk(self, rng):
        # 1e4 random factor pairs, norms stay 1 to 1e-12
        a = random_ket_array(rng, 1, 10_000)
        b = random_ket_array(rng, 1, 10_000)
        c = random_ket_array(rng, 1, 10_000)
        worst = 0.0
        for i in range(a.shape[0]):
            out = tensor_product([Ket(a[i]), Ket(b[i]), Ket(c[i])])
            worst = max(worst, abs(np.linalg.norm(out.amplitudes) - 1.0))
        assert worst < 1e-12

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            tensor_product([])

    def test_too_many_parties_rejected(self):
        with pytest.raises(ValueError, match="exceed"):
            tensor_product([ZERO, ZERO, ZERO, ZERO])


class TestPartialTrace:
    def test_ghz_reduction(self):
        ghz = reference_state("ghz")
        red = partial_trace(ghz.density(), keep=(0,))
        assert np.allclose(red.entries, np.eye(2) / 2, atol=1e-14)

    def test_w_reduction(self):
        # direct expansion: W has one excitation, P(a=1) = 1/3
        red = partial_trace(reference_state("w").density(), keep=(0,))
        assert np.allclose(red.entries, np.diag([2 / 3, 1 / 3]), atol=1e-14)

    def test_product_input_returns_factor(self, rng):
        states = random_ket_array(rng, 1, 3)
        rho = np.kron(
            np.outer(states[0], states[0].conj()),
            np.kron(
                np.outer(states[1], states[1].conj()),
                np.outer(states[2], states[2].conj()),
            ),
        )
        red = partial_trace(DensityMatrix(rho), keep=(0,))
        assert np.allclose(red.entries, np.outer(states[0], states[0].conj()), atol=1e-13)

    def test_keep_all_returns_input(self):
        rho = reference_state("ghz").density()
        assert partial_trace(rho, keep=(0, 1, 2)) is rho

    def test_empty_keep_rejected(self):
        with pytest.raises(ValueError, match="nonempty"):
            partial_trace(reference_state("ghz").density(), keep=())

    def test_complement_purity_symmetry(self, rng):
        # Tr[rho_S^2] = Tr[rho_Sbar^2] for pure states
        for vec in random_ket_array(rng, 3, 300):
            psi = Ket(vec)
            for keep, complement in (((0,), (1, 2)), ((1,), (0, 2)), ((2,), (0, 1))):
                left = partial_trace(psi, keep).purity()
                right = partial_trace(psi, complement).purity()
                assert abs(left - right) < 1e-12


BELL_PT = 0.5 * np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


class TestPartialTranspose:
    def test_product_spectrum_unchanged(self, rng):
        a, b = random_ket_array(rng, 1, 2)
        rho = np.kron(np.outer(a, a.conj()), np.outer(b, b.conj()))
        before = np.linalg.eigvalsh(rho)
        after = np.linalg.eigvalsh(partial_transpose(rho, (0,)))
        assert np.allclose(before, after, atol=1e-13)

    def test_bell_state_negative_eigenvalue(self):
        bell = Ket.normalized(np.array([1, 0, 0, 1], dtype=complex))
        pt = partial_transpose(bell.density(), (1,))
        # oracle: the transposed matrix is known entrywise
        assert np.allclose(pt, BELL_PT, atol=1e-15)
        vals = np.linalg.eigvalsh(pt)
        assert abs(vals[0] + 0.5) < 1e-12
        assert np.allclose(vals, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)

    def test_maximally_mixed_fixed_point(self):
        rho = np.eye(8) / 8
        assert np.array_equal(partial_transpose(rho, (1,)), rho)

    def test_involution_exact(self, rng):
        vec = random_ket_array(rng, 3, 1)[0]
        rho = np.outer(vec, vec.conj())
        for subset in ((0,), (1,), (2,), (0, 1), (1, 2)):
            twice = partial_transpose(partial_transpose(rho, subset), subset)
            assert np.array_equal(twice, rho)
            assert partial_transpose(rho, subset).trace() == rho.trace()

    def test_full_subset_rejected(self):
        with pytest.raises(ValueError, match="proper"):
            partial_transpose(np.eye(8) / 8, (0, 1, 2))


class TestProjectOnto:
    def test_upb_member_weight_one(self):
        fam = shifts_upb()
        p = fam.projector_p()
        projected, weight = project_onto(fam.members[0], p)
        assert abs(weight - 1.0) < 1e-12
        assert projected.isclose(fam.members[0])

    def test_optimal_state_weight(self):
        q = shifts_upb().projector_q()
        kets, _ = optimal_product_states()
        _, weight = project_onto(kets[0], q)
        assert abs(weight - 3 * np.sqrt(6) / 8) < 1e-12

    def test_orthogonal_signal(self):
        fam = shifts_upb()
        with pytest.raises(OrthogonalProjectionError):
            project_onto(fam.members[2], fam.projector_q())

    def test_weight_equals_projected_norm(self, rng):
        q = shifts_upb().projector_q()
        for vec in random_ket_array(rng, 3, 200):
            image = q.entries @ vec
            _, weight = project_onto(Ket(vec), q)
            assert abs(weight - np.vdot(image, image).real) < 1e-12


class TestOrthonormalize:
    def test_orthonormal_input_unchanged(self):
        basis = orthonormalize(list(q_basis()))
        for got, want in zip(basis, q_basis()):
            assert got.isclose(want)

    def test_gram_schmidt_simple(self):
        e0 = Ket(np.eye(4, dtype=complex)[0])
        mixed = Ket.normalized(np.array([1, 1, 0, 0], dtype=complex))
        basis = orthonormalize([e0, mixed])
        assert basis[0].isclose(e0)
        assert basis[1].isclose(Ket(np.eye(4, dtype=complex)[1]))

    def test_random_vectors_span_subspace(self, rng):
        qmat = q_basis().matrix()
        coeffs = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        vectors = [Ket.normalized(qmat @ c) for c in coeffs]
        basis = orthonormalize(vectors)
        span = basis.projector().entries
        assert np.abs(span - shifts_upb().projector_q().entries).max() < 1e-10

    def test_dependent_input_names_index(self):
        e0 = Ket(np.eye(4, dtype=complex)[0])
        with pytest.raises(DependentInputError) as err:
            orthonormalize([e0, Ket(np.eye(4, dtype=complex)[1]), e0])
        assert err.value.index == 2


class TestEigvalsHermitian:
    def test_maximally_mixed(self):
        vals = eigvals_hermitian(np.eye(8) / 8)
        assert np.allclose(vals, 1 / 8, atol=1e-14)

    def test_rho_q_spectrum(self):
        from boundent.upb import rho_q

        vals = eigvals_hermitian(rho_q(shifts_upb()))
        assert np.allclose(vals, [0, 0, 0, 0, 0.25, 0.25, 0.25, 0.25], atol=1e-12)

    def test_non_hermitian_rejected(self):
        mat = np.eye(4, dtype=complex)
        mat[0, 1] = 1.0
        with pytest.raises(ValueError, match="Hermitian"):
            eigvals_hermitian(mat)


class TestStructuredTypes:
    def test_density_matrix_validation(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(4))
        bad = np.diag([1.5, -0.5, 0, 0]).astype(complex)
        with pytest.raises(ValueError, match="negative"):
            DensityMatrix(bad)

    def test_projector_validation(self):
        with pytest.raises(ValueError, match="idempot"):
            Projector(np.eye(4) / 2, 2)
        with pytest.raises(ValueError, match="rank"):
            Projector(np.eye(4), 3)

    def test_basis_gram_validation(self):
        e = np.eye(4, dtype=complex)
        with pytest.raises(ValueError, match="Gram"):
            OrthonormalBasis((Ket(e[0]), Ket.normalized(e[0] + 0.01 * e[1])))

    def test_projector_trace_is_rank(self):
        p = shifts_upb().projector_q()
        assert abs(np.trace(p.entries).real - p.rank) < 1e-10


class TestPermuteParties:
    def test_cycle_on_basis_ket(self):
        # |abc> -> slot A gets C's state: |011> becomes |101>
        ket = tensor_product([ZERO, ONE, ONE])
        moved = permute_parties(ket, (2, 0, 1))
        assert moved.isclose(tensor_product([ONE, ZERO, ONE]))

    def test_invalid_perm_rejected(self):
        with pytest.raises(ValueError, match="permutation"):
            permute_parties(reference_state("ghz"), (0, 0, 1))


class TestSerialization:
    def test_round_trip_exact(self, rng):
        for vec in random_ket_array(rng, 3, 50):
            ket = Ket(vec)
            again = ket_from_pairs(ket_to_pairs(ket))
            assert np.max(np.abs(again.amplitudes - ket.amplitudes)) < 1e-14

    @given(kets(1))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_property(self, ket):
        again = ket_from_pairs(ket_to_pairs(ket))
        assert again.isclose(ket, atol=1e-14)


def test_canonical_phase_zero_vector_passthrough():
    out = canonical_phase(np.zeros(4))
    assert np.array_equal(out, np.zeros(4))
