import numpy as np
import pytest

from tdqss.errors import InvalidDimension, XorRequiresPowerOfTwo
from tdqss.gates import (
    CnotMode,
    GateSpec,
    apply_gate,
    cnot_permutation,
    inv_qft_matrix,
    omega_powers,
    pauli_u0s_matrix,
    qft_matrix,
)
from tdqss.state import StateVector, RegisterShape, apply_single_qudit_gate, fidelity, init_basis_state

from conftest import phase_ramp, random_state

DIMS = [2, 3, 4, 5, 7, 8, 16]


def unitarity_error(m):
    return np.abs(m.conj().T @ m - np.eye(len(m))).max()


def test_qft_d2_is_hadamard():
    np.testing.assert_allclose(qft_matrix(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)


def test_qft_d4_first_column_uniform():
    np.testing.assert_allclose(qft_matrix(4)[:, 0], np.full(4, 0.5), atol=1e-15)


def test_qft_entries_follow_positive_exponent():
    d = 5
    m = qft_matrix(d)
    for k in range(d):
        for j in range(d):
            assert abs(m[k, j] - np.exp(2j * np.pi * j * k / d) / np.sqrt(d)) <= 1e-14


@pytest.mark.parametrize("d", DIMS)
def test_all_matrices_unitary(d):
    assert unitarity_error(qft_matrix(d)) <= 1e-12
    assert unitarity_error(inv_qft_matrix(d)) <= 1e-12
    assert np.abs(qft_matrix(d) @ inv_qft_matrix(d) - np.eye(d)).max() <= 1e-12
    for s in range(d):
        assert unitarity_error(pauli_u0s_matrix(d, s)) <= 1e-12


@pytest.mark.parametrize("fn", [qft_matrix, inv_qft_matrix, lambda d: pauli_u0s_matrix(d, 0)])
def test_invalid_dimension(fn):
    with pytest.raises(InvalidDimension):
        fn(1)


def test_inverse_qft_recovers_three():
    out = inv_qft_matrix(4) @ (0.5 * 1j ** (3 * np.arange(4)))
    np.testing.assert_allclose(out, [0, 0, 0, 1], atol=1e-12)


def test_inverse_qft_zero_ramp():
    np.testing.assert_allclose(inv_qft_matrix(3) @ phase_ramp(3, 0), [1, 0, 0], atol=1e-12)


def test_inverse_qft_wraps_mod_d():
    # frozen from a plain-numpy DFT matrix built inline in this test
    d = 5
    w = np.exp(2j * np.pi / d)
    dft = np.array([[w ** (j * k) for j in range(d)] for k in range(d)]) / np.sqrt(d)
    ramp = w ** (7 * np.arange(d)) / np.sqrt(d)
    np.testing.assert_allclose(np.abs(dft.conj().T @ ramp) ** 2, [0, 0, 1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(inv_qft_matrix(d) @ ramp, [0, 0, 1, 0, 0], atol=1e-12)


@pytest.mark.parametrize("d", DIMS)
def test_inverse_qft_on_every_ramp(d):
    shape = RegisterShape(d, 1)
    for s in range(2 * d):
        out = apply_single_qudit_gate(StateVector(shape, phase_ramp(d, s)), 0, inv_qft_matrix(d))
        assert fidelity(out, init_basis_state(shape, (s % d,))) >= 1 - 1e-10


def test_pauli_values():
    np.testing.assert_array_equal(pauli_u0s_matrix(4, 0), np.eye(4))
    np.testing.assert_allclose(np.diag(pauli_u0s_matrix(4, 3)), [1, -1j, -1, 1j], atol=1e-15)
    np.testing.assert_allclose(pauli_u0s_matrix(4, 1) @ pauli_u0s_matrix(4, 2), pauli_u0s_matrix(4, 3), atol=1e-12)
    np.testing.assert_array_equal(pauli_u0s_matrix(4, 7), pauli_u0s_matrix(4, 3))


def test_omega_powers_reduce_exponent():
    # huge exponents would lose precision if turned into angles first
    assert omega_powers(7, [7 * 10**15 + 3])[0] == omega_powers(7, [3])[0]


def test_cnot_tables():
    assert cnot_permutation(4, "add")[3, 2] == 1
    assert all(cnot_permutation(4, "sub")[k, k] == 0 for k in range(4))
    xor = cnot_permutation(4, "xor")
    assert xor[3, 3] == 0 and xor[1, 2] == 3
    with pytest.raises(XorRequiresPowerOfTwo):
        cnot_permutation(6, "xor")


@pytest.mark.parametrize("d", DIMS)
def test_cnot_rows_are_bijections_and_inverses(d):
    add, sub = cnot_permutation(d, CnotMode.ADD), cnot_permutation(d, CnotMode.SUB)
    for c in range(d):
        assert sorted(add[c]) == list(range(d))
        assert list(sub[c][add[c]]) == list(range(d))
    if d & (d - 1) == 0:
        xor = cnot_permutation(d, CnotMode.XOR)
        for c in range(d):
            assert list(xor[c][xor[c]]) == list(range(d))


def _controlled_on_zero(d, rng):
    # states of the form sum_k a_k |k>|0>
    a = rng.normal(size=d) + 1j * rng.normal(size=d)
    amps = np.zeros((d, d), complex)
    amps[:, 0] = a / np.linalg.norm(a)
    return StateVector(RegisterShape(d, 2), amps.reshape(-1))


@pytest.mark.parametrize("d", [2, 3, 4, 5, 8])
def test_entangle_then_disentangle_round_trip(d, rng):
    s = _controlled_on_zero(d, rng)
    out = apply_gate(apply_gate(s, GateSpec.cnot(0, 1, "add")), GateSpec.cnot(0, 1, "sub"))
    assert np.abs(out.amplitudes - s.amplitudes).max() <= 1e-12
    if d & (d - 1) == 0:
        out = apply_gate(apply_gate(s, GateSpec.cnot(0, 1, "xor")), GateSpec.cnot(0, 1, "xor"))
        assert np.abs(out.amplitudes - s.amplitudes).max() <= 1e-12


@pytest.mark.parametrize("d", [2, 4, 8])
def test_xor_and_arithmetic_agree_on_protocol_states(d):
    for k in range(d):
        zero = init_basis_state((d, 2), (k, 0))
        same = init_basis_state((d, 2), (k, k))
        assert apply_gate(zero, GateSpec.cnot(0, 1, "add")).amplitude((k, k)) == 1
        assert apply_gate(zero, GateSpec.cnot(0, 1, "xor")).amplitude((k, k)) == 1
        assert apply_gate(same, GateSpec.cnot(0, 1, "sub")).amplitude((k, 0)) == 1
        assert apply_gate(same, GateSpec.cnot(0, 1, "xor")).amplitude((k, 0)) == 1


def test_xor_and_arithmetic_differ_elsewhere():
    s = init_basis_state((4, 2), (1, 1))
    assert apply_gate(s, GateSpec.cnot(0, 1, "add")).amplitude((1, 2)) == 1
    assert apply_gate(s, GateSpec.cnot(0, 1, "xor")).amplitude((1, 0)) == 1


def test_gate_spec_shapes():
    with pytest.raises(ValueError):
        GateSpec(GateSpec.qft(0).kind, (0, 1))
    assert GateSpec.cnot(0, 1).mode is CnotMode.ADD
    assert GateSpec.pauli_u0s(2, 9).matrix(4)[1, 1] == pytest.approx(1j)


def test_apply_gate_norm(rng):
    s = random_state(4, 3, rng)
    for spec in [GateSpec.qft(1), GateSpec.inv_qft(2), GateSpec.pauli_u0s(0, 3), GateSpec.cnot(2, 0, "xor")]:
        s = apply_gate(s, spec)
        assert abs(s.norm_squared() - 1) <= 1e-10
