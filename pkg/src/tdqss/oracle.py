"""Slow reference engine built from explicit dense matrices.

Only the test suite uses this.  Nothing here shares code with the strided
kernels: single-qudit gates are lifted with ``np.kron`` and permutation gates
are written out column by column from decoded basis digits.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import OracleTooLarge, QuditIndexOutOfRange, SelfControlledGate, ShapeMismatch
from .gates import GateKind, GateSpec
from .state import RegisterShape, StateVector

MAX_ORACLE_DIM = 4096


@dataclass(frozen=True, eq=False)
class DenseOperator:
    dim: int
    entries: np.ndarray

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        if self.dim != other.dim:
            raise ShapeMismatch(f"cannot compose {self.dim}- and {other.dim}-dimensional operators")
        return DenseOperator(self.dim, self.entries @ other.entries)

    def is_unitary(self, atol: float = 1e-12) -> bool:
        gram = self.entries.conj().T @ self.entries
        return bool(np.abs(gram - np.eye(self.dim)).max() <= atol)


def _check_size(shape: RegisterShape):
    if shape.size > MAX_ORACLE_DIM:
        raise OracleTooLarge(f"oracle limited to {MAX_ORACLE_DIM} amplitudes, got {shape.size}")


def _digits(index, d, t):
    return [(index // d ** (t - 1 - r)) % d for r in range(t)]


def _index(digits, d):
    return sum(v * d ** (len(digits) - 1 - r) for r, v in enumerate(digits))


def lift_single(shape: RegisterShape, qudit: int, matrix) -> DenseOperator:
    _check_size(shape)
    if not 0 <= qudit < shape.t:
        raise QuditIndexOutOfRange(f"qudit {qudit} not in [0, {shape.t})")
    factors = [np.eye(shape.d)] * shape.t
    factors[qudit] = np.asarray(matrix, dtype=np.complex128)
    return DenseOperator(shape.size, reduce(np.kron, factors).astype(np.complex128))


def lift_permutation(shape: RegisterShape, control: int, target: int, table) -> DenseOperator:
    _check_size(shape)
    for q in (control, target):
        if not 0 <= q < shape.t:
            raise QuditIndexOutOfRange(f"qudit {q} not in [0, {shape.t})")
    if control == target:
        raise SelfControlledGate(f"control and target are both qudit {control}")
    d, t = shape.d, shape.t
    op = np.zeros((shape.size, shape.size), dtype=np.complex128)
    for col in range(shape.size):
        digits = _digits(col, d, t)
        digits[target] = int(table[digits[control]][digits[target]])
        op[_index(digits, d), col] = 1.0
    return DenseOperator(shape.size, op)


def lift_gate(shape: RegisterShape, gate: GateSpec) -> DenseOperator:
    if gate.kind is GateKind.CNOT:
        return lift_permutation(shape, *gate.targets, gate.matrix(shape.d))
    return lift_single(shape, gate.targets[0], gate.matrix(shape.d))


def apply_dense(op: DenseOperator, state: StateVector) -> StateVector:
    if op.dim != state.shape.size:
        raise ShapeMismatch(f"{op.dim}-dimensional operator on a state of size {state.shape.size}")
    return StateVector(state.shape, op.entries @ state.amplitudes)


def identity(shape: RegisterShape) -> DenseOperator:
    _check_size(shape)
    return DenseOperator(shape.size, np.eye(shape.size, dtype=np.complex128))


def sequence_operator(shape: RegisterShape, gates) -> DenseOperator:
    """Product of lifted gates, first gate applied first."""
    op = identity(shape)
    for gate in gates:
        op = lift_gate(shape, gate) @ op
    return op


def protocol_operator(config, disentangle: bool = True) -> DenseOperator:
    from .protocol import protocol_gates

    gates = [g for _, group in protocol_gates(config, disentangle) for g in group]
    return sequence_operator(config.shape, gates)


# qubit circuits, built from 2x2 / 4x4 blocks and explicit bit enumeration

def qubit_circuit_operator(circuit) -> DenseOperator:
    from .compiler import QubitGateKind

    n = circuit.qubit_count
    shape = RegisterShape(2, n)
    _check_size(shape)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    op = identity(shape)
    for gate in circuit.gates:
        if gate.kind is QubitGateKind.H:
            step = lift_single(shape, gate.qubits[0], h)
        elif gate.kind is QubitGateKind.PHASE:
            step = lift_single(shape, gate.qubits[0], np.diag([1, np.exp(1j * gate.theta)]))
        else:
            a, b = gate.qubits
            m = np.zeros((shape.size, shape.size), dtype=np.complex128)
            for col, bits in enumerate(itertools.product((0, 1), repeat=n)):
                bits = list(bits)
                amp = 1.0
                if gate.kind is QubitGateKind.CNOT:
                    bits[b] ^= bits[a]
                elif gate.kind is QubitGateKind.SWAP:
                    bits[a], bits[b] = bits[b], bits[a]
                elif bits[a] and bits[b]:
                    amp = np.exp(1j * gate.theta)
                m[_index(bits, 2), col] = amp
            step = DenseOperator(shape.size, m)
        op = step @ op
    return op
