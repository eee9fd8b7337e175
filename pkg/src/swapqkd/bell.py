"""Symbolic Bell-pair algebra.

A Bell pair is tracked as a two-bit label (x, z): x is the bit-flip
component, z the phase component, so the four labels written "00", "01",
"10", "11" name the states

    00 : (|00> + |11>)/sqrt(2)
    01 : (|00> - |11>)/sqrt(2)
    10 : (|01> + |10>)/sqrt(2)
    11 : (|01> - |10>)/sqrt(2)

Global phase is discarded throughout; every observable in the protocol
depends only on the label. The Bell-operator measurement on one qubit from
each of two pairs (entanglement swapping) obeys a pure XOR rule that
`swap_rule` implements and the state-vector oracle cross-checks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .rng import RandomStream


@dataclass(frozen=True)
class BellLabel:
    """Two-bit name of a Bell state: x = bit-flip part, z = phase part."""

    x: int
    z: int

    def __post_init__(self):
        if self.x not in (0, 1) or self.z not in (0, 1):
            raise ValueError(f"label bits must be 0 or 1, got ({self.x}, {self.z})")

    def __xor__(self, other: "BellLabel") -> "BellLabel":
        return _LABELS[((self.x ^ other.x) << 1) | (self.z ^ other.z)]

    @property
    def index(self) -> int:
        """Position 0..3 in the fixed enumeration 00, 01, 10, 11."""
        return (self.x << 1) | self.z

    @classmethod
    def from_index(cls, i: int) -> "BellLabel":
        return _LABELS[i]

    @classmethod
    def from_string(cls, s: str) -> "BellLabel":
        if len(s) != 2 or s[0] not in "01" or s[1] not in "01":
            raise ValueError(f"expected a two-digit binary label, got {s!r}")
        return _LABELS[(int(s[0]) << 1) | int(s[1])]

    def __str__(self) -> str:
        return f"{self.x}{self.z}"


_LABELS = tuple(BellLabel(x, z) for x in (0, 1) for z in (0, 1))

ALL_LABELS = _LABELS
"""The four labels in index order: 00, 01, 10, 11."""


class PauliOp(enum.Enum):
    """Single-qubit rotation, named by which label bits it toggles."""

    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    Y = (1, 1)

    def apply(self, label: BellLabel) -> BellLabel:
        dx, dz = self.value
        return _LABELS[((label.x ^ dx) << 1) | (label.z ^ dz)]


_PAULI_BY_TOGGLE = {op.value: op for op in PauliOp}


def swap_rule(left: BellLabel, right: BellLabel, outcome: BellLabel) -> BellLabel:
    """Label of the two unmeasured qubits after a swap measurement.

    Measuring one qubit of a `left`-labelled pair together with one qubit of
    a `right`-labelled pair, and reading `outcome`, leaves the two untouched
    partners in the returned label. Componentwise XOR of all four labels in
    play is conserved, which is exactly this formula.
    """
    return _LABELS[
        (((left.x ^ right.x ^ outcome.x) << 1) | (left.z ^ right.z ^ outcome.z))
    ]


def pauli_correction(current: BellLabel, target: BellLabel) -> PauliOp:
    """The unique single-qubit rotation taking `current` to `target`."""
    return _PAULI_BY_TOGGLE[(current.x ^ target.x, current.z ^ target.z)]


class PairTable:
    """Partition of live qubits into disjoint labelled Bell pairs.

    Single-owner mutable: measurements and rotations update the table in
    place. Pairs are stored with their qubits in ascending order, which is
    safe because every Bell label is symmetric under qubit exchange up to
    global phase.
    """

    def __init__(self, pairs=()):
        self._partner: dict[int, int] = {}
        self._label: dict[tuple[int, int], BellLabel] = {}
        for a, b, label in pairs:
            self.add_pair(a, b, label)

    def add_pair(self, a: int, b: int, label: BellLabel) -> None:
        if a == b:
            raise ValueError(f"qubit {a} cannot pair with itself")
        for q in (a, b):
            if q in self._partner:
                raise ValueError(f"qubit {q} is already paired")
        self._partner[a] = b
        self._partner[b] = a
        self._label[(a, b) if a < b else (b, a)] = label

    def partner(self, q: int) -> int:
        try:
            return self._partner[q]
        except KeyError:
            raise ValueError(f"qubit {q} is not paired") from None

    def label(self, q: int) -> BellLabel:
        p = self.partner(q)
        return self._label[(q, p) if q < p else (p, q)]

    def are_partners(self, a: int, b: int) -> bool:
        return self._partner.get(a) == b

    def qubits(self) -> set[int]:
        return set(self._partner)

    def pairs(self) -> list[tuple[int, int, BellLabel]]:
        """All pairs as (low qubit, high qubit, label), sorted by low qubit."""
        return [(a, b, lab) for (a, b), lab in sorted(self._label.items())]

    def __len__(self) -> int:
        return len(self._label)

    def __eq__(self, other) -> bool:
        return isinstance(other, PairTable) and self._label == other._label

    def __repr__(self) -> str:
        body = ", ".join(f"({a},{b}):{lab}" for a, b, lab in self.pairs())
        return f"PairTable({body})"

    def copy(self) -> "PairTable":
        return PairTable(self.pairs())

    def bsm(
        self,
        a: int,
        b: int,
        randomness: RandomStream | None = None,
        force: BellLabel | None = None,
    ) -> BellLabel:
        """Bell-operator measurement on qubits a and b.

        If a and b are already partners this is an eigenstate readout: the
        pair's label is returned and nothing changes. Otherwise the two
        pairs containing a and b are consumed, the outcome is uniform over
        the four labels (or `force` when given), and the leftover partners
        of a and b form a new pair per `swap_rule`.
        """
        partner = self._partner
        labels = self._label
        try:
            j = partner[a]
        except KeyError:
            raise ValueError(f"qubit {a} is not paired") from None
        if j == b:
            got = labels[(a, b) if a < b else (b, a)]
            if force is not None and force != got:
                raise ValueError(
                    f"cannot force outcome {force} on eigenstate pair "
                    f"({a},{b}) with label {got}"
                )
            return got
        try:
            l = partner[b]
        except KeyError:
            raise ValueError(f"qubit {b} is not paired") from None
        if force is not None:
            outcome = force
        else:
            if randomness is None:
                raise ValueError("swap measurement needs a random stream or a forced outcome")
            outcome = _LABELS[int(randomness.integers(0, 4))]
        left = labels.pop((a, j) if a < j else (j, a))
        right = labels.pop((b, l) if b < l else (l, b))
        partner[a] = b
        partner[b] = a
        partner[j] = l
        partner[l] = j
        labels[(a, b) if a < b else (b, a)] = outcome
        labels[(j, l) if j < l else (l, j)] = _LABELS[
            ((left.x ^ right.x ^ outcome.x) << 1) | (left.z ^ right.z ^ outcome.z)
        ]
        return outcome

    def apply_pauli(self, q: int, op: PauliOp) -> None:
        """Toggle the label of q's pair by op; other pairs untouched."""
        p = self.partner(q)
        key = (q, p) if q < p else (p, q)
        self._label[key] = op.apply(self._label[key])
