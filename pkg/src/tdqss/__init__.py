"""Qudit state-vector simulation of threshold d-level quantum secret sharing."""
from .errors import *  # noqa: F401,F403
from .gates import (
    CnotMode,
    GateKind,
    GateSpec,
    apply_gate,
    cnot_permutation,
    inv_qft_matrix,
    pauli_u0s_matrix,
    qft_matrix,
)
from .protocol import (
    Backend,
    CnotScheme,
    ProtocolConfig,
    ProtocolResult,
    ShadowSet,
    expected_secret,
    make_shadows_random,
    make_shadows_shamir,
    run_tdqss,
)
from .state import (
    MeasurementRecord,
    RegisterShape,
    StateVector,
    apply_single_qudit_gate,
    apply_two_qudit_permutation,
    fidelity,
    init_basis_state,
    measure_qudit,
    measurement_distribution,
)

__version__ = "0.1.0"
