"""Linear-algebra layer: frozen hand-computed oracles plus algebraic properties."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qimp import qmath
from qimp.errors import ValidationError

S = 0.7071067811865476  # 1/sqrt(2) in float64


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def kron_oracle(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Independent Kronecker product via explicit index loops."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=np.complex128)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


class TestTensor:
    def test_identity_case(self):
        assert qmath.mat_eq(qmath.tensor(qmath.I2, qmath.I2), qmath.identity(4))

    def test_cnot_matrix_value(self):
        expected = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
        assert qmath.mat_eq(qmath.CNOT_GATE, expected)

    def test_h_tensor_x_frozen(self):
        # hand Kronecker expansion of H (x) X
        expected = np.array(
            [
                [0, S, 0, S],
                [S, 0, S, 0],
                [0, S, 0, -S],
                [S, 0, -S, 0],
            ],
            dtype=complex,
        )
        assert qmath.mat_eq(qmath.tensor(qmath.H_GATE, qmath.X_GATE), expected)

    @settings(max_examples=50)
    @given(st.integers(0, 10**6))
    def test_matches_loop_oracle(self, seed):
        rng = rng_from(seed)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert qmath.mat_eq(qmath.tensor(a, b), kron_oracle(a, b))

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_associative(self, seed):
        rng = rng_from(seed)
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        lhs = qmath.tensor(qmath.tensor(a, b), c)
        rhs = qmath.tensor(a, qmath.tensor(b, c))
        assert qmath.mat_eq(lhs, rhs)


class TestAdjoint:
    def test_hadamard_hermitian(self):
        assert qmath.mat_eq(qmath.adjoint(qmath.H_GATE), qmath.H_GATE)

    def test_basis_flip(self):
        assert qmath.mat_eq(qmath.adjoint(qmath.ket_bra(2, 0, 1)), qmath.ket_bra(2, 1, 0))

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_involution(self, seed):
        rng = rng_from(seed)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        assert qmath.mat_eq(qmath.adjoint(qmath.adjoint(a)), a)


class TestConjugateBy:
    def test_identity(self):
        rho = qmath.random_density(4, rng_from(7))
        assert qmath.mat_eq(qmath.conjugate_by(qmath.identity(4), rho), rho)

    def test_projector_on_plus_state(self):
        # 2x2 hand multiplication: |0><0| (0.5 ones) |0><0| = 0.5 |0><0|
        plus = np.full((2, 2), 0.5, dtype=complex)
        p0 = qmath.ket_bra(2, 0, 0)
        assert qmath.mat_eq(qmath.conjugate_by(p0, plus), 0.5 * p0)

    def test_x_flips_ground_state(self):
        p0 = qmath.ket_bra(2, 0, 0)
        p1 = qmath.ket_bra(2, 1, 1)
        assert qmath.mat_eq(qmath.conjugate_by(qmath.X_GATE, p0), p1)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_unitary_preserves_trace(self, seed):
        rng = rng_from(seed)
        u = qmath.random_unitary(4, rng)
        rho = qmath.random_density(4, rng)
        out = qmath.conjugate_by(u, rho)
        assert abs(qmath.trace_real(out) - qmath.trace_real(rho)) <= qmath.EPS_NUM

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            qmath.conjugate_by(qmath.I2, qmath.identity(4))


class TestLoewnerOrder:
    def test_zero_below_any_density(self):
        rho = qmath.random_density(4, rng_from(3))
        assert qmath.loewner_leq(qmath.zeros(4), rho)

    def test_identity_below_twice_identity(self):
        assert qmath.loewner_leq(qmath.identity(2), 2 * qmath.identity(2))

    def test_projectors_incomparable(self):
        # eigenvalues of |+><+| - |0><0| via characteristic polynomial:
        # trace 0, det -1/2, so the minimum eigenvalue is -sqrt(1/2) < 0
        plus = np.full((2, 2), 0.5, dtype=complex)
        p0 = qmath.ket_bra(2, 0, 0)
        assert not qmath.loewner_leq(p0, plus)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_reflexive(self, seed):
        rho = qmath.random_density(2, rng_from(seed))
        assert qmath.loewner_leq(rho, rho)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_antisymmetric_up_to_eps(self, seed):
        rng = rng_from(seed)
        a = qmath.random_density(2, rng)
        b = qmath.random_density(2, rng)
        if qmath.loewner_leq(a, b, 0.0) and qmath.loewner_leq(b, a, 0.0):
            assert qmath.mat_eq(a, b)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            qmath.loewner_leq(qmath.ket_bra(2, 0, 1), qmath.I2)


class TestEmbed:
    def test_single_qubit_identity_case(self):
        assert qmath.mat_eq(qmath.embed(qmath.X_GATE, [0], 1), qmath.X_GATE)

    def test_rightmost_qubit(self):
        assert qmath.mat_eq(
            qmath.embed(qmath.X_GATE, [1], 2), qmath.tensor(qmath.I2, qmath.X_GATE)
        )

    def test_reversed_cnot_permutation(self):
        # basis-vector oracle: control on qubit 1, target qubit 0 maps
        # |00>->|00>, |01>->|11>, |10>->|10>, |11>->|01|
        expected = np.array(
            [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
        )
        assert qmath.mat_eq(qmath.embed(qmath.CNOT_GATE, [1, 0], 2), expected)

    def test_middle_qubit_matches_kron_oracle(self):
        got = qmath.embed(qmath.H_GATE, [1], 3)
        want = kron_oracle(kron_oracle(qmath.I2, qmath.H_GATE), qmath.I2)
        assert qmath.mat_eq(got, want)

    @settings(max_examples=30)
    @given(st.integers(0, 10**6), st.permutations([0, 1, 2]))
    def test_preserves_unitarity(self, seed, perm):
        u = qmath.random_unitary(4, rng_from(seed))
        big = qmath.embed(u, perm[:2], 3)
        assert qmath.mat_eq(big @ qmath.adjoint(big), qmath.identity(8))

    def test_out_of_range_target(self):
        with pytest.raises(ValidationError):
            qmath.embed(qmath.X_GATE, [2], 2)


class TestMeasurements:
    def test_computational_is_complete(self):
        assert qmath.check_measurement(qmath.computational_measurement())

    def test_identity_only_is_complete(self):
        m = qmath.GeneralMeasurement((qmath.I2,), ((0,),), 1)
        assert qmath.check_measurement(m)

    def test_lone_projector_incomplete(self):
        m = qmath.GeneralMeasurement(
            (qmath.ket_bra(2, 0, 0),), ((0,),), 1, validate=False
        )
        assert not qmath.check_measurement(m)

    def test_incomplete_rejected_by_default(self):
        with pytest.raises(ValidationError):
            qmath.GeneralMeasurement((qmath.ket_bra(2, 0, 0),), ((0,),), 1)

    @settings(max_examples=50)
    @given(st.integers(0, 10**6))
    def test_mass_conservation(self, seed):
        rng = rng_from(seed)
        u = qmath.random_unitary(2, rng)
        ops = (qmath.ket_bra(2, 0, 0) @ u, qmath.ket_bra(2, 1, 1) @ u)
        m = qmath.GeneralMeasurement(ops, ((0,), (1,)), 1)
        rho = qmath.random_density(2, rng)
        total = sum(qmath.trace_real(qmath.conjugate_by(op, rho)) for op in m.ops)
        assert abs(total - qmath.trace_real(rho)) <= qmath.EPS_NUM

    def test_embedding_preserves_completeness(self):
        m = qmath.computational_measurement()
        big = qmath.embed_measurement(m, [0], 2)
        assert big.arity == 2 and qmath.check_measurement(big)

    def test_label_width_must_be_uniform(self):
        with pytest.raises(ValidationError):
            qmath.GeneralMeasurement(
                (qmath.ket_bra(2, 0, 0), qmath.ket_bra(2, 1, 1)),
                ((0,), (1, 0)),
                1,
            )


class TestMatrixText:
    def test_parse_simple_entries(self):
        got = qmath.parse_matrix("[[1, -0.5i], [2-i, 1+2e-1i]]")
        want = np.array([[1, -0.5j], [2 - 1j, 1 + 0.2j]])
        assert qmath.mat_eq(got, want)

    def test_bare_imaginary_unit(self):
        got = qmath.parse_matrix("[[i, -i], [0, 1]]")
        want = np.array([[1j, -1j], [0, 1]])
        assert qmath.mat_eq(got, want)

    def test_format_six_significant_digits(self):
        assert qmath.format_complex(complex(S, 0)) == "0.707107"

    def test_format_negative_zero_normalized(self):
        assert qmath.format_complex(complex(-0.0, 0.0)) == "0"
        assert qmath.format_complex(complex(1.0, -0.0)) == "1"

    def test_format_imaginary_entries(self):
        assert qmath.format_complex(complex(0, 1)) == "1i"
        assert qmath.format_complex(complex(2, -1)) == "2-1i"

    @settings(max_examples=40)
    @given(st.integers(0, 10**6))
    def test_round_trip(self, seed):
        a = qmath.random_density(4, rng_from(seed))
        again = qmath.parse_matrix(qmath.format_matrix(a))
        assert qmath.mat_eq(a, again, tol=1e-5)  # 6 significant digits

    def test_rejects_ragged(self):
        with pytest.raises(ValidationError):
            qmath.parse_matrix("[[1, 0], [1]]")


class TestDensityCheck:
    def test_accepts_random_density(self):
        qmath.check_density(qmath.random_density(4, rng_from(11)))

    def test_rejects_overweight(self):
        with pytest.raises(ValidationError):
            qmath.check_density(2 * qmath.identity(2))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            qmath.check_density(qmath.ket_bra(2, 0, 1))
