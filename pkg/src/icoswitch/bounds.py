"""Upper bound on the number of equally entangled pure states LOCC can tell apart."""

from __future__ import annotations

import math
from dataclasses import dataclass

SCHMIDT_TOL = 1e-12
# slack when flooring a ratio that is an integer in exact arithmetic
FLOOR_TOL = 1e-9


@dataclass(frozen=True)
class LoccBoundInput:
    d1: int
    d2: int
    schmidt: tuple[float, ...]

    def __post_init__(self):
        schmidt = tuple(float(a) for a in self.schmidt)
        object.__setattr__(self, "schmidt", schmidt)
        if self.d1 < 2 or self.d2 < 2:
            raise ValueError(f"subsystem dimensions must be >= 2, got ({self.d1}, {self.d2})")
        if len(schmidt) > min(self.d1, self.d2):
            raise ValueError(f"at most {min(self.d1, self.d2)} Schmidt coefficients allowed, got {len(schmidt)}")
        if any(a < 0 or not math.isfinite(a) for a in schmidt):
            raise ValueError("Schmidt coefficients must be finite and nonnegative")
        if not any(schmidt):
            raise ValueError("Schmidt coefficients are all zero")
        total = math.fsum(a * a for a in schmidt)
        if abs(total - 1.0) > SCHMIDT_TOL:
            raise ValueError(f"Schmidt coefficients are not normalized (sum of squares = {total!r})")

    @classmethod
    def maximal(cls, d: int) -> "LoccBoundInput":
        return cls(d, d, (1 / math.sqrt(d),) * d)


def locc_bound(inp: LoccBoundInput) -> float:
    """d1·d2 / (Σ α_i)²."""
    return inp.d1 * inp.d2 / math.fsum(inp.schmidt) ** 2


def bound_floor(value: float) -> int:
    return math.floor(value + FLOOR_TOL)


def bell_bound(d: int) -> int:
    """LOCC limit for maximally entangled two-qudit states; equals d."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    return bound_floor(locc_bound(LoccBoundInput.maximal(d)))
