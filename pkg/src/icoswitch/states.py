"""Shift gates, Fourier control states and generalized Bell states for qudits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import StateVector, UnitaryMatrix


def omega(d: int) -> complex:
    """Primitive d-th root of unity e^{2πi/d}."""
    return complex(np.exp(2j * np.pi / d))


def root_of_unity_power(d: int, n: int) -> complex:
    # reduce first so large exponents do not accumulate phase error
    return complex(np.exp(2j * np.pi * (n % d) / d))


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


@dataclass(frozen=True, order=True)
class BellIndex:
    """Label (i, j) of a Bell state: i is the phase index, j the shift index."""

    d: int
    i: int
    j: int

    def __post_init__(self):
        _check_dim(self.d)
        if not (0 <= self.i < self.d and 0 <= self.j < self.d):
            raise ValueError(f"Bell index ({self.i}, {self.j}) out of range for d={self.d}")

    @property
    def flat(self) -> int:
        """Position in lexicographic (i, j) order."""
        return self.i * self.d + self.j

    @classmethod
    def from_flat(cls, d: int, flat: int) -> "BellIndex":
        return cls(d, *divmod(flat, d))

    def __str__(self):
        return f"({self.i},{self.j})"


@dataclass(frozen=True, order=True)
class FourierIndex:
    d: int
    idx: int

    def __post_init__(self):
        _check_dim(self.d)
        if not 0 <= self.idx < self.d:
            raise ValueError(f"Fourier index {self.idx} out of range for d={self.d}")


def shift(d: int) -> UnitaryMatrix:
    """Cyclic shift |k> -> |k+1 mod d> as an exact 0/1 permutation matrix."""
    _check_dim(d)
    m = np.zeros((d, d), dtype=np.complex128)
    for k in range(d):
        m[(k + 1) % d, k] = 1.0
    return UnitaryMatrix(m, check=False)


def clock(d: int) -> UnitaryMatrix:
    """Phase gate |k> -> ω^k |k>."""
    _check_dim(d)
    return UnitaryMatrix(np.diag([root_of_unity_power(d, k) for k in range(d)]))


def fourier_amplitudes(d: int, idx: int) -> np.ndarray:
    return np.array([root_of_unity_power(d, k * idx) for k in range(d)]) / np.sqrt(d)


def fourier_state(d: int, idx: int | FourierIndex) -> StateVector:
    """(1/√d) Σ_k ω^{k·idx} |k>."""
    if isinstance(idx, FourierIndex):
        if idx.d != d:
            raise ValueError(f"FourierIndex is for d={idx.d}, not d={d}")
        idx = idx.idx
    FourierIndex(d, idx)
    return StateVector((d,), fourier_amplitudes(d, idx))


def bell_amplitudes(d: int, i: int, j: int) -> np.ndarray:
    """Amplitude matrix M[a, b] of Σ_k ω^{ik} |k>_A |k+j>_B / √d."""
    m = np.zeros((d, d), dtype=np.complex128)
    for k in range(d):
        m[k, (k + j) % d] = root_of_unity_power(d, i * k)
    return m / np.sqrt(d)


def bell_state(idx: BellIndex) -> StateVector:
    return StateVector((idx.d, idx.d), bell_amplitudes(idx.d, idx.i, idx.j).ravel())


def bell_basis(d: int) -> list[StateVector]:
    _check_dim(d)
    return [bell_state(BellIndex(d, i, j)) for i in range(d) for j in range(d)]


def control_label(d: int, idx: int) -> str:
    return f"D_{idx}"


def control_alias(d: int, idx: int) -> str | None:
    """Traditional name of a control outcome at d=3 (F_l) and d=4 (H_l)."""
    prefix = {3: "F", 4: "H"}.get(d)
    return None if prefix is None else f"{prefix}_{idx}"


def bell_label(idx: BellIndex) -> str:
    return {3: "Psi", 4: "psi"}.get(idx.d, "phi") + f"_{{{idx.i},{idx.j}}}"
