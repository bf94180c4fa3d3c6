"""Dense state vectors for registers of equal-dimension qudits.

Flat index convention: qudit 0 is the most significant base-``d`` digit, so
``index = sum(digits[r] * d**(t - 1 - r))``.  Gate kernels reshape the flat
amplitude array into a ``(d,) * t`` tensor view and never build the full
``d**t x d**t`` operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    GateShapeMismatch,
    InvalidBasisDigit,
    InvalidDimension,
    InvalidPermutation,
    QuditIndexOutOfRange,
    RegisterTooLarge,
    SelfControlledGate,
    ShapeMismatch,
)

MAX_AMPLITUDES = 2**26


@dataclass(frozen=True)
class RegisterShape:
    d: int
    t: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvalidDimension(f"qudit dimension must be an integer >= 2, got {self.d!r}")
        if int(self.t) != self.t or self.t < 1:
            raise InvalidDimension(f"qudit count must be an integer >= 1, got {self.t!r}")
        # compare in exact integer arithmetic before anything gets allocated
        if int(self.d) ** int(self.t) > MAX_AMPLITUDES:
            raise RegisterTooLarge(
                f"{self.d}**{self.t} amplitudes exceeds the cap of {MAX_AMPLITUDES}"
            )

    @property
    def size(self) -> int:
        return self.d**self.t

    @property
    def tensor_shape(self) -> tuple:
        return (self.d,) * self.t

    def check_qudit(self, qudit: int) -> int:
        if not 0 <= qudit < self.t:
            raise QuditIndexOutOfRange(f"qudit {qudit} not in [0, {self.t})")
        return int(qudit)

    def index_of(self, digits: Sequence[int]) -> int:
        digits = tuple(digits)
        if len(digits) != self.t:
            raise InvalidBasisDigit(f"expected {self.t} digits, got {len(digits)}")
        index = 0
        for digit in digits:
            if int(digit) != digit or not 0 <= digit < self.d:
                raise InvalidBasisDigit(f"digit {digit!r} not in [0, {self.d})")
            index = index * self.d + int(digit)
        return index

    def digits_of(self, index: int) -> tuple:
        if not 0 <= index < self.size:
            raise InvalidBasisDigit(f"flat index {index} not in [0, {self.size})")
        digits = []
        for _ in range(self.t):
            index, digit = divmod(index, self.d)
            digits.append(digit)
        return tuple(reversed(digits))


@dataclass(frozen=True, eq=False)
class StateVector:
    shape: RegisterShape
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.shape.size:
            raise ShapeMismatch(
                f"{amps.shape[0]} amplitudes given for a register of size {self.shape.size}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def t(self) -> int:
        return self.shape.t

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.shape.tensor_shape)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def amplitude(self, digits: Sequence[int]) -> complex:
        return complex(self.amplitudes[self.shape.index_of(digits)])

    def terms(self, atol: float = 1e-12):
        """Yield ``(digits, amplitude)`` for amplitudes with magnitude above ``atol``."""
        for index in np.flatnonzero(np.abs(self.amplitudes) > atol):
            yield self.shape.digits_of(int(index)), complex(self.amplitudes[index])


@dataclass(frozen=True)
class MeasurementRecord:
    qudit: int
    outcome: int
    probability: float
    post_state: StateVector


def _as_shape(shape) -> RegisterShape:
    if isinstance(shape, RegisterShape):
        return shape
    d, t = shape
    return RegisterShape(int(d), int(t))


def init_basis_state(shape, digits: Sequence[int]) -> StateVector:
    shape = _as_shape(shape)
    amps = np.zeros(shape.size, dtype=np.complex128)
    amps[shape.index_of(digits)] = 1.0
    return StateVector(shape, amps)


def from_amplitudes(shape, amplitudes, normalize: bool = False) -> StateVector:
    shape = _as_shape(shape)
    amps = np.array(amplitudes, dtype=np.complex128).reshape(-1)
    if normalize:
        amps = amps / np.linalg.norm(amps)
    return StateVector(shape, amps)


def apply_single_qudit_gate(state: StateVector, qudit: int, gate) -> StateVector:
    d, t = state.d, state.t
    qudit = state.shape.check_qudit(qudit)
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (d, d):
        raise GateShapeMismatch(f"expected a {d}x{d} matrix, got shape {gate.shape}")
    view = state.amplitudes.reshape(d**qudit, d, d ** (t - qudit - 1))
    out = np.einsum("ij,ajb->aib", gate, view, optimize=False)
    return StateVector(state.shape, out.reshape(-1))


def check_permutation_table(perm, d: int) -> np.ndarray:
    table = np.asarray(perm)
    if table.shape != (d, d):
        raise InvalidPermutation(f"permutation table must have shape ({d}, {d}), got {table.shape}")
    if not np.issubdtype(table.dtype, np.integer):
        raise InvalidPermutation("permutation table entries must be integers")
    expected = np.arange(d)
    for c, row in enumerate(table):
        if not np.array_equal(np.sort(row), expected):
            raise InvalidPermutation(f"row for control value {c} is not a bijection on [0, {d})")
    return table.astype(np.intp)


def _pair_view(state: StateVector, a: int, b: int) -> np.ndarray:
    # axes (a, b, rest...) so the pair can be indexed directly
    return np.moveaxis(state.tensor(), (a, b), (0, 1))


def _restore_pair(shape: RegisterShape, view: np.ndarray, a: int, b: int) -> StateVector:
    return StateVector(shape, np.moveaxis(view, (0, 1), (a, b)).reshape(-1))


def apply_two_qudit_permutation(state: StateVector, control: int, target: int, perm) -> StateVector:
    """Send the amplitude at ``(.., c, .., x, ..)`` to ``(.., c, .., perm[c][x], ..)``.

    ``perm`` is a ``d x d`` integer table; each row must be a bijection.
    Amplitudes are moved, never combined, so the result is exact.
    """
    shape = state.shape
    control = shape.check_qudit(control)
    target = shape.check_qudit(target)
    if control == target:
        raise SelfControlledGate(f"control and target are both qudit {control}")
    table = check_permutation_table(perm, shape.d)

    src = _pair_view(state, control, target)
    out = np.empty_like(src)
    rows = np.arange(shape.d)[:, None]
    out[rows, table] = src
    return _restore_pair(shape, out, control, target)


def apply_two_qudit_gate(state: StateVector, first: int, second: int, gate) -> StateVector:
    """General two-qudit unitary; ``gate`` acts on ``|first, second>`` with ``first`` major."""
    shape = state.shape
    first = shape.check_qudit(first)
    second = shape.check_qudit(second)
    if first == second:
        raise SelfControlledGate(f"both operands are qudit {first}")
    d = shape.d
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (d * d, d * d):
        raise GateShapeMismatch(f"expected a {d * d}x{d * d} matrix, got shape {gate.shape}")
    src = _pair_view(state, first, second)
    rest = src.shape[2:]
    out = (gate @ src.reshape(d * d, -1)).reshape((d, d) + rest)
    return _restore_pair(shape, out, first, second)


def measurement_distribution(state: StateVector, qudit: int) -> np.ndarray:
    d, t = state.d, state.t
    qudit = state.shape.check_qudit(qudit)
    probs = state.probabilities().reshape(d**qudit, d, d ** (t - qudit - 1))
    return probs.sum(axis=(0, 2))


def measure_qudit(state: StateVector, qudit: int, rng: np.random.Generator) -> MeasurementRecord:
    """Sample a computational-basis outcome on one qudit and collapse the state.

    A distribution with a single nonzero entry is returned without consuming
    randomness, so a point mass gives the same record for every seed.
    """
    dist = measurement_distribution(state, qudit)
    support = np.flatnonzero(dist > 0)
    if len(support) == 1:
        outcome = int(support[0])
    else:
        p = dist / dist.sum()
        outcome = int(rng.choice(state.d, p=p))
    prob = float(dist[outcome])

    d, t = state.d, state.t
    post = state.amplitudes.reshape(d**qudit, d, d ** (t - qudit - 1)).copy()
    keep = np.zeros(d, dtype=bool)
    keep[outcome] = True
    post[:, ~keep, :] = 0.0
    post /= np.sqrt(prob)
    return MeasurementRecord(qudit, outcome, prob, StateVector(state.shape, post.reshape(-1)))


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare {a.shape} with {b.shape}")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, abs(overlap) ** 2))


def align_global_phase(reference: StateVector, other: StateVector) -> StateVector:
    """Return ``other`` multiplied by the phase that best matches ``reference``."""
    if reference.shape != other.shape:
        raise ShapeMismatch(f"cannot compare {reference.shape} with {other.shape}")
    overlap = np.vdot(other.amplitudes, reference.amplitudes)
    if abs(overlap) == 0:
        return other
    return StateVector(other.shape, other.amplitudes * (overlap / abs(overlap)))
