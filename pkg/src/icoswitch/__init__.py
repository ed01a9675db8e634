"""Qudit simulation of the quantum d-switch and the Bell-state analyzer built on it."""

from .bounds import LoccBoundInput, bell_bound, locc_bound
from .bsa import (
    ConfusionMatrix,
    MeasurementRecord,
    analyze_deterministic,
    confusion,
    decode,
    deterministic_confusion,
    iterate_switch,
    sample,
)
from .gravity import (
    EventOrdering,
    EventUnitaryAssignment,
    compose_branch,
    gravitational_switch,
    standard_assignment,
    verify_correspondence,
)
from .linalg import SizeLimitError, StateVector, UnitaryMatrix, apply, fidelity, kron, mat_pow
from .states import BellIndex, FourierIndex, bell_basis, bell_state, fourier_state, shift
from .switch import (
    ControlDecomposition,
    SwitchConfig,
    apply_branchwise,
    build_dense,
    canonical_config,
    decompose_control,
    verify_switch_law,
)

__version__ = "0.1.0"
