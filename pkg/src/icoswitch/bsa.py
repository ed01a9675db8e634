"""Bell-state analysis with the d-switch.

The unknown Bell pair is fed through the switch with the control in |D_0>.
Measuring the control in the Fourier basis yields l = (d - i) mod d; measuring
Alice and Bob in the computational basis yields (j_A, j_B) with
j_B - j_A ≡ j + 1 (mod d). :func:`decode` inverts both relations.

Sampling uses numpy's PCG64 generator (``numpy.random.default_rng``). Seeds
for :func:`confusion` are derived per true state as
``SeedSequence(seed, spawn_key=(state.flat,))``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .linalg import StateVector
from .states import BellIndex, bell_state
from .switch import ControlDecomposition, SwitchConfig, apply_branchwise, decompose_control, switch_input

HERALD_TOL = 1e-10
SUPPORT_TOL = 1e-12
MAX_SEED = 2**64 - 1


class NonHeraldedInputError(ValueError):
    """The switch output did not leave the control in a single Fourier state."""


class AmbiguousOutcomeError(ValueError):
    """Target outcomes in the support decode to different Bell labels."""


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def decode(d: int, control: int, j_a: int, j_b: int) -> BellIndex:
    for name, val in (("control outcome", control), ("j_A", j_a), ("j_B", j_b)):
        if not 0 <= val < d:
            raise ValueError(f"{name} {val} out of range for d={d}")
    return BellIndex(d, (d - control) % d, (j_b - j_a - 1) % d)


@dataclass(frozen=True)
class MeasurementRecord:
    control_outcome: int
    alice_outcome: int
    bob_outcome: int
    decoded: BellIndex

    def __post_init__(self):
        d = self.decoded.d
        if self.decoded != decode(d, self.control_outcome, self.alice_outcome, self.bob_outcome):
            raise ValueError("decoded label inconsistent with the recorded outcomes")

    @classmethod
    def from_outcomes(cls, d: int, control: int, j_a: int, j_b: int) -> "MeasurementRecord":
        return cls(control, j_a, j_b, decode(d, control, j_a, j_b))

    def to_dict(self) -> dict:
        return asdict(self)


def _run(d: int, true_state: BellIndex, switch: SwitchConfig) -> ControlDecomposition:
    if switch.d != d or true_state.d != d:
        raise ValueError(f"dimension mismatch: d={d}, switch d={switch.d}, state d={true_state.d}")
    return decompose_control(apply_branchwise(switch, switch_input(d, bell_state(true_state))))


def target_support(target: StateVector, tol: float = SUPPORT_TOL) -> list[tuple[int, int]]:
    d_a, d_b = target.dims
    probs = np.abs(target.amplitudes) ** 2
    return [divmod(int(k), d_b) for k in np.flatnonzero(probs > tol)]


def analyze_deterministic(d: int, true_state: BellIndex, switch: SwitchConfig) -> MeasurementRecord:
    """Noise-free run: take the heralded control outcome and check every target outcome.

    Returns the record for the first (j_A, j_B) in the support; raises if the
    control is not heralded or the support does not decode consistently.
    """
    dec = _run(d, true_state, switch)
    if dec.residual > HERALD_TOL:
        raise NonHeraldedInputError(
            f"control residual {dec.residual:.3e} exceeds {HERALD_TOL:g}; input is not heralded by the switch"
        )
    support = target_support(dec.projected_target())
    labels = {decode(d, dec.dominant, a, b) for a, b in support}
    if len(labels) != 1:
        raise AmbiguousOutcomeError(f"target outcomes decode to {sorted(labels)}")
    j_a, j_b = support[0]
    return MeasurementRecord.from_outcomes(d, dec.dominant, j_a, j_b)


def sample(d: int, true_state: BellIndex, switch: SwitchConfig, shots: int, seed: int,
           rng: np.random.Generator | None = None) -> list[MeasurementRecord]:
    """Born-rule measurement records: control first, then (j_A, j_B) given the control outcome."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(_check_seed(seed)) if rng is None else rng
    dec = _run(d, true_state, switch)
    p_ctrl = np.asarray(dec.probabilities)
    controls = rng.choice(d, size=shots, p=p_ctrl / p_ctrl.sum())
    pairs = np.empty(shots, dtype=np.int64)
    for l in np.unique(controls):
        mask = controls == l
        p_t = np.abs(dec.targets[l]) ** 2
        pairs[mask] = rng.choice(d * d, size=int(mask.sum()), p=p_t / p_t.sum())
    return [
        MeasurementRecord.from_outcomes(d, int(l), *divmod(int(k), d))
        for l, k in zip(controls, pairs)
    ]


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    d: int
    counts: np.ndarray
    shots_per_state: int

    def __post_init__(self):
        n = self.d * self.d
        if self.counts.shape != (n, n):
            raise ValueError(f"counts must be {n}x{n}")
        if np.any(self.counts < 0) or np.any(self.counts.sum(axis=1) != self.shots_per_state):
            raise ValueError("every row must hold shots_per_state nonnegative counts")

    def normalized(self) -> np.ndarray:
        return self.counts / self.shots_per_state

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.counts.sum()

    @property
    def off_diagonal(self) -> int:
        return int(self.counts.sum() - np.trace(self.counts))

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.counts, self.shots_per_state * np.eye(self.d**2, dtype=np.int64)))


def state_seed(seed: int, state: BellIndex) -> np.random.SeedSequence:
    return np.random.SeedSequence(_check_seed(seed), spawn_key=(state.flat,))


def confusion(d: int, switch: SwitchConfig, shots_per_state: int, seed: int) -> ConfusionMatrix:
    n = d * d
    counts = np.zeros((n, n), dtype=np.int64)
    for flat in range(n):
        true = BellIndex.from_flat(d, flat)
        rng = np.random.default_rng(state_seed(seed, true))
        for rec in sample(d, true, switch, shots_per_state, seed, rng=rng):
            counts[flat, rec.decoded.flat] += 1
    return ConfusionMatrix(d, counts, shots_per_state)


def deterministic_confusion(d: int, switch: SwitchConfig, shots_per_state: int = 1) -> ConfusionMatrix:
    """Confusion matrix from :func:`analyze_deterministic`, each state counted ``shots_per_state`` times."""
    n = d * d
    counts = np.zeros((n, n), dtype=np.int64)
    for flat in range(n):
        rec = analyze_deterministic(d, BellIndex.from_flat(d, flat), switch)
        counts[flat, rec.decoded.flat] += shots_per_state
    return ConfusionMatrix(d, counts, shots_per_state)


@dataclass(frozen=True)
class IterationResult:
    controls: tuple[ControlDecomposition, ...]
    target: StateVector

    @property
    def control_outcomes(self) -> tuple[int, ...]:
        return tuple(c.dominant for c in self.controls)


def iterate_switch(d: int, true_state: BellIndex, switch: SwitchConfig, rounds: int) -> IterationResult:
    """Run the switch repeatedly on the same pair.

    Before each round the control is measured (the dominant outcome is kept)
    and a fresh |D_0> is prepared; the target carries over.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    if switch.d != d or true_state.d != d:
        raise ValueError("dimension mismatch")
    target = bell_state(true_state)
    controls = []
    for _ in range(rounds):
        dec = decompose_control(apply_branchwise(switch, switch_input(d, target)))
        controls.append(dec)
        target = dec.projected_target()
    return IterationResult(tuple(controls), target)
