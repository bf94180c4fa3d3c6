"""Reconstruction stage of threshold d-level quantum secret sharing.

Bob_1 (qudit 0) prepares a Fourier state, fans it out with CNOTs, every
participant imprints the phase ``omega**(s_r * k)``, Bob_1 undoes the fan-out
(the disentanglement step) and finally applies the inverse QFT, leaving his
qudit in ``|sum(s_r) mod d>``.

Share dealing helpers (uniform random shares and Shamir/Lagrange shares) live
here as well since they only exist to feed the protocol.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    ConfigError,
    InvalidDimension,
    InvalidEvaluationPoints,
    InvalidSecret,
    ShamirRequiresPrime,
)
from .gates import CnotMode, GateSpec, apply_gate, is_power_of_two
from .state import (
    RegisterShape,
    StateVector,
    init_basis_state,
    measure_qudit,
    measurement_distribution,
)

STAGES = ("phi2", "phi3", "phi4", "phi5")


class CnotScheme(enum.Enum):
    ADD_SUB = "add-sub"
    XOR = "xor"


class Backend(enum.Enum):
    QUDIT = "qudit"
    QUBIT = "qubit"


@dataclass(frozen=True)
class ShadowSet:
    d: int
    shadows: Tuple[int, ...]

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise InvalidDimension(f"dimension must be an integer >= 2, got {self.d!r}")
        values = tuple(int(s) % self.d for s in self.shadows)
        if not values:
            raise ConfigError("a shadow set needs at least one participant")
        object.__setattr__(self, "shadows", values)

    @property
    def t(self) -> int:
        return len(self.shadows)

    def __len__(self):
        return len(self.shadows)

    def __iter__(self):
        return iter(self.shadows)


@dataclass(frozen=True)
class ProtocolConfig:
    shape: RegisterShape
    shadows: ShadowSet
    cnot_mode: CnotScheme = CnotScheme.ADD_SUB
    backend: Backend = Backend.QUDIT
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "cnot_mode", CnotScheme(self.cnot_mode))
        object.__setattr__(self, "backend", Backend(self.backend))
        if self.shadows.d != self.shape.d:
            raise ConfigError(
                f"shadow dimension {self.shadows.d} differs from register dimension {self.shape.d}"
            )
        if self.shadows.t != self.shape.t:
            raise ConfigError(f"{self.shadows.t} shadows given for t={self.shape.t} participants")
        if self.cnot_mode is CnotScheme.XOR and not is_power_of_two(self.shape.d):
            raise ConfigError(f"XOR CNOT mode requires d = 2**n, got d={self.shape.d}")
        if self.backend is Backend.QUBIT and not is_power_of_two(self.shape.d):
            raise ConfigError(f"qubit backend requires d = 2**n, got d={self.shape.d}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @classmethod
    def create(cls, d: int, shadows: Sequence[int], cnot_mode="add-sub", backend="qudit", seed: int = 0):
        try:
            shape = RegisterShape(d, len(shadows))
            shadow_set = ShadowSet(d, tuple(shadows))
            return cls(shape, shadow_set, CnotScheme(cnot_mode), Backend(backend), int(seed))
        except InvalidDimension as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def t(self) -> int:
        return self.shape.t


@dataclass
class ProtocolResult:
    config: ProtocolConfig
    trace: Dict[str, StateVector]
    distribution: np.ndarray
    reconstructed: int
    measurements: Tuple[int, ...] = ()
    display: Optional[str] = None
    disentangled: bool = True
    extras: dict = field(default_factory=dict)


def expected_secret(shadows: ShadowSet) -> int:
    return sum(shadows.shadows) % shadows.d


def protocol_gates(config: ProtocolConfig, disentangle: bool = True):
    """Gate sequence of the qudit protocol grouped by the stage each group ends.

    Returns ``[(stage_label, [GateSpec, ...]), ...]``; the QFT is folded into
    ``phi2`` since no trace label is kept for it alone.
    """
    t = config.t
    if config.cnot_mode is CnotScheme.XOR:
        entangle, release = CnotMode.XOR, CnotMode.XOR
    else:
        entangle, release = CnotMode.ADD, CnotMode.SUB

    others = range(1, t)
    stages = [
        ("phi2", [GateSpec.qft(0)] + [GateSpec.cnot(0, r, entangle) for r in others]),
        ("phi3", [GateSpec.pauli_u0s(r, s) for r, s in enumerate(config.shadows)]),
        ("phi4", [GateSpec.cnot(0, r, release) for r in others] if disentangle else []),
        ("phi5", [GateSpec.inv_qft(0)]),
    ]
    return stages


def _finish(config: ProtocolConfig, trace: Dict[str, StateVector], disentangle: bool) -> ProtocolResult:
    final = trace["phi5"]
    dist = measurement_distribution(final, 0)
    rng = np.random.default_rng(config.seed)
    outcomes = []
    state = final
    for qudit in range(config.t):
        record = measure_qudit(state, qudit, rng)
        outcomes.append(record.outcome)
        state = record.post_state
    return ProtocolResult(
        config=config,
        trace=trace,
        distribution=dist,
        reconstructed=int(np.argmax(dist)),
        measurements=tuple(outcomes),
        disentangled=disentangle,
    )


def run_tdqss(config: ProtocolConfig, disentangle: bool = True) -> ProtocolResult:
    """Run the reconstruction and return traces, distribution and the recovered value.

    ``disentangle=False`` skips the fan-in CNOTs before the inverse QFT; it is a
    diagnostic that exposes the uncorrected protocol and usually leaves qudit 0
    in a spread-out distribution.
    """
    if config.backend is Backend.QUBIT:
        from .compiler import run_compiled

        return run_compiled(config, disentangle=disentangle)

    state = init_basis_state(config.shape, (0,) * config.t)
    trace = {}
    for label, gates in protocol_gates(config, disentangle):
        for spec in gates:
            state = apply_gate(state, spec)
        trace[label] = state
    return _finish(config, trace, disentangle)


def make_shadows_random(d: int, t: int, secret: int, rng: np.random.Generator) -> ShadowSet:
    if int(d) != d or d < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {d!r}")
    if t < 1:
        raise ConfigError(f"need at least one participant, got t={t}")
    if not 0 <= secret < d:
        raise InvalidSecret(f"secret {secret} not in [0, {d})")
    values = [int(v) for v in rng.integers(0, d, size=t)]
    values[-1] = (secret - sum(values[:-1])) % d
    return ShadowSet(d, tuple(values))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def lagrange_at_zero(xs: Sequence[int], p: int) -> Tuple[int, ...]:
    """Lagrange basis weights at x=0 over GF(p), one per evaluation point."""
    weights = []
    for r, xr in enumerate(xs):
        lam = 1
        for q, xq in enumerate(xs):
            if q != r:
                lam = lam * xq * pow(xq - xr, -1, p) % p
        weights.append(lam)
    return tuple(weights)


def shamir_polynomial(secret: int, coefficients: Sequence[int], x: int, p: int) -> int:
    y = 0
    for c in reversed((secret, *coefficients)):
        y = (y * x + c) % p
    return y


def make_shadows_shamir(
    d: int,
    secret: int,
    coefficients: Sequence[int],
    xs: Sequence[int],
) -> ShadowSet:
    """Shamir shares ``f(x_r)`` pre-weighted by their Lagrange coefficients.

    The returned shadows add up to ``secret`` mod ``d``, which is the form the
    reconstruction circuit consumes.
    """
    if not is_prime(d):
        raise ShamirRequiresPrime(f"Shamir dealing needs a prime dimension, got d={d}")
    if not 0 <= secret < d:
        raise InvalidSecret(f"secret {secret} not in [0, {d})")
    xs = [int(x) for x in xs]
    reduced = [x % d for x in xs]
    if not xs or 0 in reduced or len(set(reduced)) != len(reduced):
        raise InvalidEvaluationPoints(f"evaluation points must be distinct and nonzero mod {d}: {xs}")
    if len(coefficients) != len(xs) - 1:
        raise ConfigError(
            f"{len(xs)} evaluation points need {len(xs) - 1} coefficients, got {len(coefficients)}"
        )
    lams = lagrange_at_zero(reduced, d)
    shares = [shamir_polynomial(secret, coefficients, x, d) for x in reduced]
    return ShadowSet(d, tuple(lam * y % d for lam, y in zip(lams, shares)))


def deal_shamir_random(
    d: int, t: int, secret: int, rng: np.random.Generator, xs: Optional[Sequence[int]] = None
) -> ShadowSet:
    """Shamir dealing with random polynomial coefficients; ``xs`` default to ``1..t``."""
    if xs is None:
        xs = range(1, t + 1)
    coefficients = [int(c) for c in rng.integers(0, d, size=t - 1)]
    return make_shadows_shamir(d, secret, coefficients, list(xs))
