"""The quantum d-switch: control-conditioned local unitaries on a two-qudit target.

Control basis ket |k> (k = 0..d-1) selects the pair ``(u_ops[k], v_ops[k])``
acting on Alice and Bob respectively, i.e.

    S = Σ_k |k><k| ⊗ U_{k+1} ⊗ V_{k+1}.

Two application routes are provided: :func:`build_dense` materializes the
d³×d³ operator (capped at d = 12), :func:`apply_branchwise` works one control
branch at a time and never forms it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    TOL_STATE,
    SizeLimitError,
    StateVector,
    UnitaryMatrix,
    fidelity,
    kron,
    mat_pow,
    max_abs_diff,
)
from .states import BellIndex, bell_state, fourier_amplitudes, fourier_state, shift

DENSE_MAX_D = 12
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SwitchConfig:
    d: int
    u_ops: tuple[UnitaryMatrix, ...]
    v_ops: tuple[UnitaryMatrix, ...]

    def __post_init__(self):
        u_ops, v_ops = tuple(self.u_ops), tuple(self.v_ops)
        if len(u_ops) != self.d or len(v_ops) != self.d:
            raise ValueError(f"need {self.d} operators per party, got {len(u_ops)} and {len(v_ops)}")
        for op in u_ops + v_ops:
            if op.dim != self.d:
                raise ValueError(f"operator of dimension {op.dim} in a d={self.d} switch")
            # constructors may skip the certificate; enforce it here
            UnitaryMatrix(op.entries)
        object.__setattr__(self, "u_ops", u_ops)
        object.__setattr__(self, "v_ops", v_ops)

    def branch(self, k: int) -> tuple[UnitaryMatrix, UnitaryMatrix]:
        return self.u_ops[k], self.v_ops[k]


@dataclass(frozen=True)
class ControlDecomposition:
    """Fourier-basis breakdown of the control register of a switch output.

    ``weights[l]`` is the complex overlap <D_l ⊗ τ|ψ> against the normalized
    target τ of the dominant branch; ``probabilities[l]`` is the full Born
    weight of outcome l. For a product output the two agree in modulus.
    """

    d: int
    weights: tuple[complex, ...]
    probabilities: tuple[float, ...]
    dominant: int
    residual: float
    targets: tuple[np.ndarray, ...] = field(repr=False, compare=False)

    def projected_target(self, idx: int | None = None) -> StateVector:
        """Normalized target state left after the control is found in |D_idx>."""
        idx = self.dominant if idx is None else idx
        return StateVector.normalized((self.d, self.d), self.targets[idx])


def canonical_config(d: int) -> SwitchConfig:
    """U_k = shift^(k-1), V_k = shift^k for k = 1..d."""
    s = shift(d)
    return SwitchConfig(
        d,
        tuple(mat_pow(s, k) for k in range(d)),
        tuple(mat_pow(s, k + 1) for k in range(d)),
    )


def build_dense(cfg: SwitchConfig, max_d: int = DENSE_MAX_D) -> UnitaryMatrix:
    d = cfg.d
    if d > max_d:
        raise SizeLimitError(
            f"dense d-switch is capped at d={max_d} (d^3 x d^3 operator); use apply_branchwise for d={d}"
        )
    n = d * d
    out = np.zeros((d * n, d * n), dtype=np.complex128)
    for k in range(d):
        u, v = cfg.branch(k)
        out[k * n : (k + 1) * n, k * n : (k + 1) * n] = kron(u, v).entries
    # block-diagonal with unitary blocks; the full certificate is left to callers
    return UnitaryMatrix(out, check=False)


def _check_input(cfg: SwitchConfig, state: StateVector) -> None:
    d = cfg.d
    if state.dims != (d, d, d):
        raise ValueError(f"switch input must have dims {(d, d, d)}, got {state.dims}")


def apply_dense(cfg: SwitchConfig, state: StateVector, dense: UnitaryMatrix | None = None) -> StateVector:
    _check_input(cfg, state)
    dense = build_dense(cfg) if dense is None else dense
    return StateVector(state.dims, dense.entries @ state.amplitudes)


def apply_branchwise(cfg: SwitchConfig, state: StateVector) -> StateVector:
    """Apply the switch one control branch at a time.

    On branch k the d×d target amplitude block T transforms as U T Vᵀ,
    which is (U ⊗ V) acting on the flattened block.
    """
    _check_input(cfg, state)
    psi = state.tensor()
    out = np.empty_like(psi)
    for k in range(cfg.d):
        u, v = cfg.branch(k)
        out[k] = u.entries @ psi[k] @ v.entries.T
    return StateVector(state.dims, out.ravel())


def switch_input(d: int, target: StateVector, control: int = 0) -> StateVector:
    """|D_control> ⊗ target."""
    if target.dims != (d, d):
        raise ValueError(f"target must have dims {(d, d)}, got {target.dims}")
    return fourier_state(d, control) @ target


def decompose_control(output: StateVector) -> ControlDecomposition:
    """Project the control of a (d, d, d) state onto each Fourier state |D_l>."""
    d = output.dims[0]
    if output.dims != (d, d, d):
        raise ValueError(f"expected dims {(d, d, d)}, got {output.dims}")
    psi = output.amplitudes.reshape(d, d * d)
    fourier = np.stack([fourier_amplitudes(d, l) for l in range(d)])
    # row l: (<D_l| ⊗ I) |psi>
    targets = fourier.conj() @ psi
    probs = np.sum(np.abs(targets) ** 2, axis=1)
    # smallest l among probabilities equal to the maximum up to rounding
    dominant = int(np.flatnonzero(probs >= probs.max() - TIE_TOL)[0])
    ref = targets[dominant] / np.linalg.norm(targets[dominant])
    weights = tuple(complex(np.vdot(ref, t)) for t in targets)
    residual = max(0.0, 1.0 - float(probs[dominant]))
    return ControlDecomposition(
        d=d,
        weights=weights,
        probabilities=tuple(float(p) for p in probs),
        dominant=dominant,
        residual=residual,
        targets=tuple(targets),
    )


def control_target_schmidt(output: StateVector) -> np.ndarray:
    """Singular values of the d × d² control/target reshaping."""
    d = output.dims[0]
    return np.linalg.svd(output.amplitudes.reshape(d, -1), compute_uv=False)


@dataclass(frozen=True)
class LawCase:
    index: BellIndex
    expected_control: int
    dominant: int
    fidelity: float
    max_error: float
    passed: bool


@dataclass(frozen=True)
class LawReport:
    d: int
    cases: tuple[LawCase, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def n_passed(self) -> int:
        return sum(c.passed for c in self.cases)


def verify_switch_law(d: int, tol: float = TOL_STATE, cfg: SwitchConfig | None = None,
                      max_d: int = 16) -> LawReport:
    """Check S |D_0> |φ_ij> = |D_{(d-i) mod d}> |φ_{i,(j+1) mod d}> for every (i, j).

    Both fidelity and entrywise equality are required; no global phase is
    allowed. Failures are reported per case rather than raised.
    """
    if not 2 <= d <= max_d:
        raise ValueError(f"d must lie in [2, {max_d}], got {d}")
    cfg = canonical_config(d) if cfg is None else cfg
    cases = []
    for i in range(d):
        for j in range(d):
            idx = BellIndex(d, i, j)
            out = apply_branchwise(cfg, switch_input(d, bell_state(idx)))
            ctrl = (d - i) % d
            expected = fourier_state(d, ctrl) @ bell_state(BellIndex(d, i, (j + 1) % d))
            fid = fidelity(out, expected)
            err = max_abs_diff(out.amplitudes, expected.amplitudes)
            dom = decompose_control(out).dominant
            cases.append(LawCase(idx, ctrl, dom, fid, err, fid >= 1 - tol and err <= tol and dom == ctrl))
    return LawReport(d, tuple(cases))
