"""Dense complex state vectors and unitaries over labeled tensor spaces.

Amplitudes are stored row-major over ``dims`` with the first subsystem
slowest-varying, so a control ⊗ Alice ⊗ Bob vector reshapes directly to a
``(d, d, d)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

TOL_NORM = 1e-12
TOL_UNITARY = 1e-10
TOL_STATE = 1e-12

# d**3 for the largest dense switch (d = 12)
MAX_DENSE_DIM = 12**3


class SizeLimitError(ValueError):
    """Raised when a dense operator would exceed the configured size cap."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(x) for x in self.dims)
        if not dims or any(x < 2 for x in dims):
            raise ValueError(f"subsystem dimensions must be >= 2, got {dims}")
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != prod(dims):
            raise ValueError(f"expected {prod(dims)} amplitudes for dims {dims}, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > TOL_NORM:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, dims: Sequence[int], amplitudes) -> "StateVector":
        """Build a state from arbitrary nonzero amplitudes, rescaling to unit norm."""
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(tuple(dims), amps / norm)

    @classmethod
    def basis(cls, dims: Sequence[int], index: Sequence[int]) -> "StateVector":
        dims = tuple(dims)
        amps = np.zeros(prod(dims), dtype=np.complex128)
        amps[np.ravel_multi_index(tuple(index), dims)] = 1.0
        return cls(dims, amps)

    @property
    def size(self) -> int:
        return self.amplitudes.size

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amplitudes.reshape(self.dims)

    def __matmul__(self, other: "StateVector") -> "StateVector":
        # |self> ⊗ |other>
        return StateVector(self.dims + other.dims, np.kron(self.amplitudes, other.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        """<self|other>"""
        if self.dims != other.dims:
            raise ValueError(f"shape mismatch: {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def allclose(self, other: "StateVector", atol: float = TOL_STATE) -> bool:
        """Entrywise comparison; global phase is *not* ignored."""
        return self.dims == other.dims and max_abs_diff(self.amplitudes, other.amplitudes) <= atol


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    entries: np.ndarray
    check: bool = True

    def __post_init__(self):
        m = _frozen(self.entries)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"unitary must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "entries", m)
        if self.check:
            err = self.unitarity_error()
            if err > TOL_UNITARY:
                raise ValueError(f"matrix is not unitary (||M^dag M - I||_max = {err:.3e})")

    @classmethod
    def identity(cls, dim: int) -> "UnitaryMatrix":
        return cls(np.eye(dim, dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def unitarity_error(self) -> float:
        """||M†M − I||_max, the unitarity certificate."""
        m = self.entries
        return float(np.max(np.abs(m.conj().T @ m - np.eye(self.dim))))

    def adjoint(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T, check=False)

    def __matmul__(self, other: "UnitaryMatrix") -> "UnitaryMatrix":
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return UnitaryMatrix(self.entries @ other.entries, check=False)

    def equals_exactly(self, other: "UnitaryMatrix") -> bool:
        return self.dim == other.dim and bool(np.array_equal(self.entries, other.entries))


def max_abs_diff(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def kron(a: UnitaryMatrix, b: UnitaryMatrix, max_dim: int = MAX_DENSE_DIM) -> UnitaryMatrix:
    """Kronecker product with ``result[p*nb + q, r*nb + s] = a[p, r] * b[q, s]``."""
    dim = a.dim * b.dim
    if dim > max_dim:
        raise SizeLimitError(f"kron result dimension {dim} exceeds cap {max_dim}")
    # a product of unitaries is unitary; skip the O(n^3) certificate here
    return UnitaryMatrix(np.kron(a.entries, b.entries), check=False)


def mat_pow(m: UnitaryMatrix, e: int) -> UnitaryMatrix:
    """``m`` multiplied ``e`` times (plain repeated product, so permutations stay exact)."""
    if e < 0:
        raise ValueError(f"exponent must be nonnegative, got {e}")
    out = np.eye(m.dim, dtype=np.complex128)
    for _ in range(e):
        out = out @ m.entries
    return UnitaryMatrix(out, check=False)


def apply(m: UnitaryMatrix, v: StateVector, subsystem: int) -> StateVector:
    """Apply ``m`` to one tensor factor of ``v``, leaving the others untouched."""
    if not 0 <= subsystem < len(v.dims):
        raise IndexError(f"subsystem {subsystem} out of range for dims {v.dims}")
    if m.dim != v.dims[subsystem]:
        raise ValueError(
            f"operator dimension {m.dim} does not match subsystem {subsystem} of dimension {v.dims[subsystem]}"
        )
    t = np.tensordot(m.entries, v.tensor(), axes=([1], [subsystem]))
    t = np.moveaxis(t, 0, subsystem)
    return StateVector(v.dims, t.ravel())


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, clipped into [0, 1]."""
    return min(1.0, abs(a.inner(b)) ** 2)
