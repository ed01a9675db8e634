"""Event-ordering construction of the d-switch.

Alice has one event A; Bob has d-1 events B_1 -> ... -> B_{d-1} in fixed
order. A mass placed in one of d positions fixes where A falls among Bob's
events. Branch ``m`` is the configuration in which A happens after exactly
``d-1-m`` of Bob's events, so branch 0 is ``B1→...→B_{d-1}→A`` and branch d-1
is ``A→B1→...→B_{d-1}``.

Every event applies a power of the shift gate. An event that lies in the
causal future of the other party's event uses the *conditioned* unitary
(``U_{A|B_k}`` or ``U_{B_k|A}``), otherwise the unconditioned one. Gravitational
physics (masses, radii, proper times) is reduced to these ordering labels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import UnitaryMatrix, mat_pow
from .states import shift
from .switch import SwitchConfig, canonical_config


@dataclass(frozen=True)
class EventOrdering:
    d: int
    branch: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if not 0 <= self.branch < self.d:
            raise ValueError(f"branch {self.branch} out of range for d={self.d}")

    @property
    def bob_events_before_alice(self) -> int:
        return self.d - 1 - self.branch

    def events(self) -> list[str]:
        """Event names in causal order."""
        n = self.bob_events_before_alice
        bob = [f"B{k}" for k in range(1, self.d)]
        return bob[:n] + ["A"] + bob[n:]

    @property
    def label(self) -> str:
        return "M: " + "→".join(self.events())

    def alice_signals(self) -> str:
        n = self.bob_events_before_alice
        if n == 0:
            return "Alice: no signal received"
        if n == 1:
            return "Alice receives Bob's signal b1" + (" only" if self.d > 2 else "")
        names = [f"b{k}" for k in range(1, n + 1)]
        return f"Alice receives Bob's signals {', '.join(names[:-1])} and {names[-1]}"

    def bob_signals(self) -> str:
        n = self.bob_events_before_alice
        if n == self.d - 1:
            return "Bob: no signal received"
        return f"Bob receives Alice's signal a before B{n + 1}"


@dataclass(frozen=True)
class EventUnitaryAssignment:
    """Shift exponents of every event unitary (keys are Bob event numbers 1..d-1)."""

    d: int
    alice_unconditioned_exp: int
    alice_conditioned_exps: dict[int, int]
    bob_unconditioned_exps: dict[int, int]
    bob_conditioned_exps: dict[int, int]

    def __post_init__(self):
        keys = set(range(1, self.d))
        for name in ("alice_conditioned_exps", "bob_unconditioned_exps", "bob_conditioned_exps"):
            exps = getattr(self, name)
            if set(exps) != keys:
                raise ValueError(f"{name} must have keys 1..{self.d - 1}, got {sorted(exps)}")
            if any(e < 0 for e in exps.values()):
                raise ValueError(f"{name} exponents must be nonnegative")
        if self.alice_unconditioned_exp < 0:
            raise ValueError("alice_unconditioned_exp must be nonnegative")


def standard_assignment(d: int) -> EventUnitaryAssignment:
    """U_A = shift^(d-1), U_{A|B_k} = shift^(d-1-k), U_{B_k} = shift^(d-1), U_{B_k|A} = I."""
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    bobs = range(1, d)
    return EventUnitaryAssignment(
        d=d,
        alice_unconditioned_exp=d - 1,
        alice_conditioned_exps={k: d - 1 - k for k in bobs},
        bob_unconditioned_exps={k: d - 1 for k in bobs},
        bob_conditioned_exps={k: 0 for k in bobs},
    )


@dataclass(frozen=True, eq=False)
class BranchComposition:
    branch: EventOrdering
    alice_op: UnitaryMatrix
    bob_op: UnitaryMatrix
    alice_factor: str
    bob_factors: tuple[str, ...]
    alice_exp_raw: int
    bob_exp_raw: int
    alice_exp_mod_d: int
    bob_exp_mod_d: int

    @property
    def bob_product(self) -> str:
        return " ".join(self.bob_factors)


def compose_branch(assign: EventUnitaryAssignment, ordering: EventOrdering) -> BranchComposition:
    """Multiply out the event unitaries that act on Alice and Bob in one branch.

    The matrices are formed by actual products of shift powers; the exponent
    bookkeeping is carried alongside so the two can be compared.
    """
    d = assign.d
    if ordering.d != d:
        raise ValueError(f"assignment is for d={d}, ordering for d={ordering.d}")
    s = shift(d)
    n = ordering.bob_events_before_alice

    if n == 0:
        alice_exp, alice_name = assign.alice_unconditioned_exp, "U_A"
    else:
        alice_exp, alice_name = assign.alice_conditioned_exps[n], f"U_A|B{n}"
    alice_op = mat_pow(s, alice_exp)

    bob_op = UnitaryMatrix.identity(d)
    bob_exp = 0
    factors = []
    # earliest event first; each later event multiplies on the left
    for k in range(1, d):
        if k <= n:
            e, name = assign.bob_unconditioned_exps[k], f"U_B{k}"
        else:
            e, name = assign.bob_conditioned_exps[k], f"U_B{k}|A"
        bob_op = mat_pow(s, e) @ bob_op
        bob_exp += e
        factors.insert(0, name)

    return BranchComposition(
        branch=ordering,
        alice_op=alice_op,
        bob_op=bob_op,
        alice_factor=alice_name,
        bob_factors=tuple(factors),
        alice_exp_raw=alice_exp,
        bob_exp_raw=bob_exp,
        alice_exp_mod_d=alice_exp % d,
        bob_exp_mod_d=bob_exp % d,
    )


@dataclass(frozen=True)
class BranchLedger:
    branch: int
    label: str
    alice_signals: str
    bob_signals: str
    alice_factor: str
    bob_product: str
    alice_exp_raw: int
    alice_exp_mod_d: int
    bob_exp_raw: int
    bob_exp_mod_d: int
    control_ket: int
    matrix_match: bool
    exponent_match: bool

    @property
    def passed(self) -> bool:
        return self.matrix_match and self.exponent_match


@dataclass(frozen=True)
class CorrespondenceReport:
    d: int
    branches: tuple[BranchLedger, ...]

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.branches)


def exponent_identity_holds(d: int, m: int) -> bool:
    """(d-1)(d-1-m) ≡ m+1 (mod d), by integer arithmetic alone."""
    return ((d - 1) * (d - 1 - m) - (m + 1)) % d == 0


def verify_correspondence(d: int, assign: EventUnitaryAssignment | None = None) -> CorrespondenceReport:
    """Compare each composed branch against the canonical switch, matrix and exponent."""
    assign = standard_assignment(d) if assign is None else assign
    canon = canonical_config(d)
    rows = []
    for m in range(d):
        ordering = EventOrdering(d, m)
        comp = compose_branch(assign, ordering)
        matrix_match = comp.alice_op.equals_exactly(canon.u_ops[m]) and comp.bob_op.equals_exactly(canon.v_ops[m])
        exponent_match = (
            comp.alice_exp_mod_d == m
            and comp.bob_exp_mod_d == (m + 1) % d
            and comp.bob_exp_raw == (d - 1) * ordering.bob_events_before_alice
            and exponent_identity_holds(d, m)
        )
        rows.append(
            BranchLedger(
                branch=m,
                label=ordering.label,
                alice_signals=ordering.alice_signals(),
                bob_signals=ordering.bob_signals(),
                alice_factor=comp.alice_factor,
                bob_product=comp.bob_product,
                alice_exp_raw=comp.alice_exp_raw,
                alice_exp_mod_d=comp.alice_exp_mod_d,
                bob_exp_raw=comp.bob_exp_raw,
                bob_exp_mod_d=comp.bob_exp_mod_d,
                control_ket=m,
                matrix_match=matrix_match,
                exponent_match=exponent_match,
            )
        )
    return CorrespondenceReport(d, tuple(rows))


def gravitational_switch(d: int, assign: EventUnitaryAssignment | None = None) -> SwitchConfig:
    assign = standard_assignment(d) if assign is None else assign
    comps = [compose_branch(assign, EventOrdering(d, m)) for m in range(d)]
    return SwitchConfig(d, tuple(c.alice_op for c in comps), tuple(c.bob_op for c in comps))
