"""Unitaries used by the reconstruction protocol.

Phases are built from integer exponents reduced mod ``d`` before conversion to
an angle, so ``omega**(s*k)`` never accumulates drift from repeated products.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidDimension, QuditIndexOutOfRange, XorRequiresPowerOfTwo
from .state import StateVector, apply_single_qudit_gate, apply_two_qudit_permutation


class GateKind(enum.Enum):
    QFT = "qft"
    INV_QFT = "inv_qft"
    PAULI_U0S = "pauli_u0s"
    CNOT = "cnot"


class CnotMode(enum.Enum):
    ADD = "add"
    SUB = "sub"
    XOR = "xor"


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


def omega_powers(d: int, exponents) -> np.ndarray:
    """``exp(2*pi*i*e/d)`` for integer exponents ``e``, reduced mod ``d`` first."""
    reduced = np.mod(np.asarray(exponents, dtype=np.int64), d)
    return np.exp(2j * np.pi * reduced / d)


def qft_matrix(d: int) -> np.ndarray:
    d = _check_dim(d)
    k = np.arange(d)
    return omega_powers(d, np.outer(k, k)) / np.sqrt(d)


def inv_qft_matrix(d: int) -> np.ndarray:
    return qft_matrix(d).conj().T


def pauli_u0s_matrix(d: int, s: int) -> np.ndarray:
    d = _check_dim(d)
    return np.diag(omega_powers(d, (int(s) % d) * np.arange(d)))


def cnot_permutation(d: int, mode) -> np.ndarray:
    """Table ``perm[c, x]`` giving the new target value for control ``c``."""
    d = _check_dim(d)
    mode = CnotMode(mode)
    c = np.arange(d)[:, None]
    x = np.arange(d)[None, :]
    if mode is CnotMode.ADD:
        return (x + c) % d
    if mode is CnotMode.SUB:
        return (x - c) % d
    if not is_power_of_two(d):
        raise XorRequiresPowerOfTwo(f"XOR CNOT needs d = 2**n, got d={d}")
    return np.bitwise_xor(x, c)


@dataclass(frozen=True)
class GateSpec:
    """Symbolic gate: a kind, its targets, and the parameter it needs (if any).

    Single-qudit kinds take ``targets=(q,)``; CNOT takes ``(control, target)``.
    """

    kind: GateKind
    targets: Tuple[int, ...]
    s: int = 0
    mode: Optional[CnotMode] = None

    @classmethod
    def qft(cls, qudit: int) -> "GateSpec":
        return cls(GateKind.QFT, (qudit,))

    @classmethod
    def inv_qft(cls, qudit: int) -> "GateSpec":
        return cls(GateKind.INV_QFT, (qudit,))

    @classmethod
    def pauli_u0s(cls, qudit: int, s: int) -> "GateSpec":
        return cls(GateKind.PAULI_U0S, (qudit,), s=int(s))

    @classmethod
    def cnot(cls, control: int, target: int, mode="add") -> "GateSpec":
        return cls(GateKind.CNOT, (control, target), mode=CnotMode(mode))

    def __post_init__(self):
        expected = 2 if self.kind is GateKind.CNOT else 1
        if len(self.targets) != expected:
            raise QuditIndexOutOfRange(
                f"{self.kind.value} takes {expected} target(s), got {self.targets}"
            )
        if self.kind is GateKind.CNOT and self.mode is None:
            object.__setattr__(self, "mode", CnotMode.ADD)

    def matrix(self, d: int) -> np.ndarray:
        """Single-qudit matrix, or the CNOT permutation table."""
        if self.kind is GateKind.QFT:
            return qft_matrix(d)
        if self.kind is GateKind.INV_QFT:
            return inv_qft_matrix(d)
        if self.kind is GateKind.PAULI_U0S:
            return pauli_u0s_matrix(d, self.s % d)
        return cnot_permutation(d, self.mode)


def apply_gate(state: StateVector, spec: GateSpec) -> StateVector:
    if spec.kind is GateKind.CNOT:
        control, target = spec.targets
        return apply_two_qudit_permutation(state, control, target, spec.matrix(state.d))
    return apply_single_qudit_gate(state, spec.targets[0], spec.matrix(state.d))
