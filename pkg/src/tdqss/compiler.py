"""Compile the protocol for ``d = 2**n`` into a plain qubit circuit.

Qudit ``r`` is stored in qubits ``[r*n, (r+1)*n)``, least significant bit
first.  The qubit register itself is simulated as a ``d=2`` register, so qubit
0 is the most significant bit of the flat qubit index (the same convention the
qudit simulator uses); display strings put the highest-numbered qubit first.

Text format, one gate per line after a ``qubits <count>`` header::

    H q0
    P(1.570796326795) q2
    CX q0 q2
    CP(-1.570796326795) q0 q1
    SWAP q0 q1
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BlockLengthMismatch,
    CircuitParseError,
    InvalidBasisDigit,
    InvalidBitCount,
    OverlappingBlocks,
    QuditIndexOutOfRange,
    RequiresPowerOfTwo,
)
from .gates import is_power_of_two
from .state import (
    RegisterShape,
    StateVector,
    apply_single_qudit_gate,
    apply_two_qudit_gate,
    apply_two_qudit_permutation,
    init_basis_state,
)

ANGLE_FORMAT = "{:.12f}"


class QubitGateKind(enum.Enum):
    H = "H"
    PHASE = "P"
    CNOT = "CX"
    CPHASE = "CP"
    SWAP = "SWAP"


_TWO_QUBIT = {QubitGateKind.CNOT, QubitGateKind.CPHASE, QubitGateKind.SWAP}
_PARAMETRIC = {QubitGateKind.PHASE, QubitGateKind.CPHASE}


@dataclass(frozen=True)
class QubitGate:
    kind: QubitGateKind
    qubits: Tuple[int, ...]
    theta: Optional[float] = None

    def __post_init__(self):
        kind = QubitGateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        arity = 2 if kind in _TWO_QUBIT else 1
        if len(qubits) != arity:
            raise QuditIndexOutOfRange(f"{kind.value} acts on {arity} qubit(s), got {qubits}")
        if arity == 2 and qubits[0] == qubits[1]:
            raise OverlappingBlocks(f"{kind.value} needs two distinct qubits, got {qubits}")
        if kind in _PARAMETRIC:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{kind.value} needs a finite angle, got {self.theta!r}")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{kind.value} takes no angle")

    def inverse(self) -> "QubitGate":
        if self.kind in _PARAMETRIC:
            return QubitGate(self.kind, self.qubits, -self.theta)
        return self

    def to_text(self) -> str:
        name = self.kind.value
        if self.kind in _PARAMETRIC:
            name = f"{name}({ANGLE_FORMAT.format(self.theta)})"
        return " ".join([name] + [f"q{q}" for q in self.qubits])


@dataclass(frozen=True)
class QubitCircuit:
    """Ordered gate list; ``stages`` marks ``(label, end)`` gate-index boundaries."""

    qubit_count: int
    gates: Tuple[QubitGate, ...]
    stages: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            for q in gate.qubits:
                if not 0 <= q < self.qubit_count:
                    raise QuditIndexOutOfRange(f"qubit {q} outside a {self.qubit_count}-qubit circuit")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def inverse(self) -> "QubitCircuit":
        return QubitCircuit(self.qubit_count, [g.inverse() for g in reversed(self.gates)])

    def to_text(self) -> str:
        lines = [f"qubits {self.qubit_count}"]
        lines.extend(g.to_text() for g in self.gates)
        return "\n".join(lines) + "\n"


def concat(qubit_count: int, fragments: Iterable[QubitCircuit]) -> QubitCircuit:
    gates: List[QubitGate] = []
    for frag in fragments:
        gates.extend(frag.gates)
    return QubitCircuit(qubit_count, gates)


_LINE = re.compile(r"^(?P<name>[A-Z]+)(?:\((?P<theta>[^)]*)\))?\s+(?P<qubits>q\d+(?:\s+q\d+)*)$")


def circuit_from_text(text: str) -> QubitCircuit:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("qubits "):
        raise CircuitParseError("missing 'qubits <count>' header")
    try:
        count = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise CircuitParseError(f"bad header: {lines[0]!r}") from exc
    gates = []
    for lineno, line in enumerate(lines[1:], start=2):
        m = _LINE.match(line)
        if m is None:
            raise CircuitParseError(f"line {lineno}: cannot parse {line!r}")
        try:
            kind = QubitGateKind(m["name"])
            theta = float(m["theta"]) if m["theta"] is not None else None
            qubits = tuple(int(q[1:]) for q in m["qubits"].split())
            gates.append(QubitGate(kind, qubits, theta))
        except ValueError as exc:
            raise CircuitParseError(f"line {lineno}: {exc}") from exc
    try:
        return QubitCircuit(count, gates)
    except ValueError as exc:
        raise CircuitParseError(str(exc)) from exc


def bits_for(d: int) -> int:
    if not is_power_of_two(d) or d < 2:
        raise RequiresPowerOfTwo(f"d must be a power of two >= 2, got {d}")
    return d.bit_length() - 1


@dataclass(frozen=True)
class BasisMap:
    n: int
    t: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidBitCount(f"need at least one bit per qudit, got n={self.n}")

    @property
    def d(self) -> int:
        return 2**self.n

    @property
    def qubit_count(self) -> int:
        return self.n * self.t

    def block(self, qudit: int) -> Tuple[int, ...]:
        return tuple(range(qudit * self.n, (qudit + 1) * self.n))

    def bits(self, digits: Sequence[int]) -> Tuple[int, ...]:
        """Bit value of each qubit ``q0..q_{n*t-1}``."""
        digits = tuple(digits)
        if len(digits) != self.t:
            raise InvalidBasisDigit(f"expected {self.t} digits, got {len(digits)}")
        out = []
        for digit in digits:
            if int(digit) != digit or not 0 <= digit < self.d:
                raise InvalidBasisDigit(f"digit {digit!r} not in [0, {self.d})")
            out.extend((int(digit) >> k) & 1 for k in range(self.n))
        return tuple(out)

    def qubit_index(self, digits: Sequence[int]) -> int:
        index = 0
        for bit in self.bits(digits):
            index = (index << 1) | bit
        return index

    def digits(self, qubit_index: int) -> Tuple[int, ...]:
        total = self.qubit_count
        if not 0 <= qubit_index < 2**total:
            raise InvalidBasisDigit(f"qubit index {qubit_index} out of range")
        bits = [(qubit_index >> (total - 1 - q)) & 1 for q in range(total)]
        return tuple(
            sum(bits[r * self.n + k] << k for k in range(self.n)) for r in range(self.t)
        )

    def display(self, digits: Sequence[int]) -> str:
        return "".join(str(b) for b in reversed(self.bits(digits)))

    def index_table(self) -> np.ndarray:
        """``table[i]`` is the qubit flat index of qudit flat index ``i``."""
        shape = RegisterShape(self.d, self.t)
        return np.array([self.qubit_index(shape.digits_of(i)) for i in range(shape.size)], dtype=np.intp)


def basis_index_map(basis_map: BasisMap, digits: Sequence[int]) -> int:
    return basis_map.qubit_index(digits)


def pull_back(basis_map: BasisMap, qubit_state: StateVector) -> StateVector:
    table = basis_map.index_table()
    return StateVector(RegisterShape(basis_map.d, basis_map.t), qubit_state.amplitudes[table])


def push_forward(basis_map: BasisMap, qudit_state: StateVector) -> StateVector:
    amps = np.zeros(qudit_state.shape.size, dtype=np.complex128)
    amps[basis_map.index_table()] = qudit_state.amplitudes
    return StateVector(RegisterShape(2, basis_map.qubit_count), amps)


def decompose_phase_gate(d: int, s: int) -> Tuple[float, ...]:
    """Per-bit phase angles whose product of ``P(theta_k)`` gates equals ``U_{0,s}``."""
    n = bits_for(d)
    s = int(s) % d
    return tuple(2 * math.pi * (s * 2**k) / d for k in range(n))


def qft_qubit_circuit(n: int, block: Optional[Sequence[int]] = None) -> QubitCircuit:
    """QFT over ``Z_{2**n}`` on an LSB-first block, swaps emitted explicitly."""
    if int(n) != n or n < 1:
        raise InvalidBitCount(f"need n >= 1 bits, got {n!r}")
    block = tuple(range(n)) if block is None else tuple(block)
    if len(block) != n:
        raise BlockLengthMismatch(f"block {block} does not hold {n} qubits")
    gates = []
    for i in reversed(range(n)):
        gates.append(QubitGate(QubitGateKind.H, (block[i],)))
        for m in reversed(range(i)):
            gates.append(QubitGate(QubitGateKind.CPHASE, (block[m], block[i]), math.pi / 2 ** (i - m)))
    for i in range(n // 2):
        gates.append(QubitGate(QubitGateKind.SWAP, (block[i], block[n - 1 - i])))
    return QubitCircuit(max(block) + 1, gates)


def inverse_qft_qubit_circuit(n: int, block: Optional[Sequence[int]] = None) -> QubitCircuit:
    return qft_qubit_circuit(n, block).inverse()


def cnot_d_transversal(control_block: Sequence[int], target_block: Sequence[int]) -> QubitCircuit:
    control_block, target_block = tuple(control_block), tuple(target_block)
    if len(control_block) != len(target_block):
        raise BlockLengthMismatch(f"blocks of length {len(control_block)} and {len(target_block)}")
    if set(control_block) & set(target_block):
        raise OverlappingBlocks(f"blocks {control_block} and {target_block} share qubits")
    gates = [QubitGate(QubitGateKind.CNOT, (c, x)) for c, x in zip(control_block, target_block)]
    return QubitCircuit(max(control_block + target_block) + 1, gates)


def compile_protocol(config, disentangle: bool = True) -> QubitCircuit:
    """Qubit circuit for a protocol config; stage marks match the qudit trace labels.

    Phase gates are emitted for every nonzero shadow, including angles equal to
    a multiple of 2*pi; a zero shadow is the identity and emits nothing.
    """
    n = bits_for(config.d)
    bmap = BasisMap(n, config.t)
    total = bmap.qubit_count
    bob1 = bmap.block(0)
    fan = [cnot_d_transversal(bob1, bmap.block(r)) for r in range(1, config.t)]

    phases = []
    for r, s in enumerate(config.shadows):
        if s % config.d == 0:
            continue
        for q, theta in zip(bmap.block(r), decompose_phase_gate(config.d, s)):
            phases.append(QubitGate(QubitGateKind.PHASE, (q,), theta))

    groups = [
        ("phi2", [qft_qubit_circuit(n, bob1)] + fan),
        ("phi3", [QubitCircuit(total, phases)]),
        ("phi4", fan if disentangle else []),
        ("phi5", [inverse_qft_qubit_circuit(n, bob1)]),
    ]
    gates: List[QubitGate] = []
    stages = []
    for label, frags in groups:
        for frag in frags:
            gates.extend(frag.gates)
        stages.append((label, len(gates)))
    return QubitCircuit(total, gates, tuple(stages))


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_SWAP = np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]
_XOR_TABLE = np.array([[0, 1], [1, 0]])


def apply_qubit_gate(state: StateVector, gate: QubitGate) -> StateVector:
    kind = gate.kind
    if kind is QubitGateKind.H:
        return apply_single_qudit_gate(state, gate.qubits[0], _H)
    if kind is QubitGateKind.PHASE:
        return apply_single_qudit_gate(state, gate.qubits[0], np.diag([1, np.exp(1j * gate.theta)]))
    if kind is QubitGateKind.CNOT:
        return apply_two_qudit_permutation(state, *gate.qubits, _XOR_TABLE)
    if kind is QubitGateKind.CPHASE:
        return apply_two_qudit_gate(state, *gate.qubits, np.diag([1, 1, 1, np.exp(1j * gate.theta)]))
    return apply_two_qudit_gate(state, *gate.qubits, _SWAP)


def simulate_circuit(circuit: QubitCircuit, state: Optional[StateVector] = None) -> StateVector:
    if state is None:
        state = init_basis_state(RegisterShape(2, circuit.qubit_count), (0,) * circuit.qubit_count)
    elif state.shape != RegisterShape(2, circuit.qubit_count):
        raise BlockLengthMismatch(f"state {state.shape} does not match a {circuit.qubit_count}-qubit circuit")
    for gate in circuit.gates:
        state = apply_qubit_gate(state, gate)
    return state


def simulate_stages(circuit: QubitCircuit, state: Optional[StateVector] = None) -> dict:
    """Qubit states at each stage boundary; the whole circuit counts as ``phi5`` if unmarked."""
    stages = circuit.stages or (("phi5", len(circuit.gates)),)
    out = {}
    start = 0
    for label, end in stages:
        state = simulate_circuit(QubitCircuit(circuit.qubit_count, circuit.gates[start:end]), state)
        out[label] = state
        start = end
    return out


def run_compiled(config, disentangle: bool = True, circuit: Optional[QubitCircuit] = None):
    """Qubit-backend protocol run, with states pulled back to the qudit register."""
    from .protocol import _finish

    bmap = BasisMap(bits_for(config.d), config.t)
    if circuit is None:
        circuit = compile_protocol(config, disentangle)
    elif circuit.qubit_count != bmap.qubit_count:
        raise BlockLengthMismatch(
            f"circuit has {circuit.qubit_count} qubits, config needs {bmap.qubit_count}"
        )
    qubit_trace = simulate_stages(circuit)
    trace = {label: pull_back(bmap, st) for label, st in qubit_trace.items()}
    result = _finish(config, trace, disentangle)
    result.display = bmap.display(result.measurements)
    result.extras["circuit"] = circuit
    return result
