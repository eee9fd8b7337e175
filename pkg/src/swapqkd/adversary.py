"""Intercept-and-swap eavesdropper.

Eve holds an ancilla Bell pair and attacks both transmissions of a round:
she swaps the outbound qubit onto one ancilla, reads the returning qubit
against that ancilla (an eigenstate measurement, since her first swap made
them partners), then measures her two ancillas together, which both frees
them for the next round and hands the correlation back so the legitimate
parties still see a well-formed announcement. After Alice's announcement
Eve can reconstruct both secret results exactly. The price is that her
ancilla-pair measurement re-randomizes the correlation Alice and Bob
compare, which is what the eavesdropping test detects.

Separation of knowledge is structural: Eve's quantum access goes through a
`ChannelTap` that only reaches her ancillas and the qubit currently in
transit, and her inference functions receive public announcements and her
own recorded outcomes, never the transcript's secret fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bell import BellLabel, PairTable, pauli_correction
from .knowledge import KnowledgeLedger, Party
from .rng import RandomStream


class AccessViolation(RuntimeError):
    """Eve touched a qubit that is neither hers nor in transit."""


class ChannelTap:
    """Eve's only handle on the quantum state.

    Wraps the live pair table but refuses measurements involving any qubit
    outside her ancillas and the single qubit currently in the channel.
    """

    def __init__(self, table: PairTable, randomness: RandomStream,
                 ancillas: tuple[int, int], transit: int):
        self._table = table
        self._rng = randomness
        self._allowed = frozenset((*ancillas, transit))
        self.transit = transit

    def bsm(self, a: int, b: int, force: BellLabel | None = None) -> BellLabel:
        if a not in self._allowed or b not in self._allowed:
            raise AccessViolation(
                f"measurement on ({a},{b}) is outside Eve's reach {sorted(self._allowed)}"
            )
        return self._table.bsm(a, b, self._rng, force=force)

    def are_partners(self, a: int, b: int) -> bool:
        """Pair structure is public; Eve may query it for reachable qubits."""
        if a not in self._allowed or b not in self._allowed:
            raise AccessViolation(f"({a},{b}) is outside Eve's reach")
        return self._table.are_partners(a, b)


@dataclass
class EveRoundRecord:
    """Eve's per-round outcomes and reconstructions, kept out of the
    legitimate parties' transcript fields."""

    outbound_outcome: BellLabel
    return_readout: BellLabel
    detach_outcome: BellLabel
    inferred_alice: BellLabel
    inferred_bob: BellLabel


@dataclass
class EveState:
    """Attack state across one round.

    `link_label`, `anchor_label`, `bob_label` are the publicly agreed pair
    labels of the round being attacked; `ancilla_label` is whatever Eve
    prepared her own pair in. All other fields are her recorded outcomes.
    """

    link_label: BellLabel
    anchor_label: BellLabel
    bob_label: BellLabel
    ancilla_label: BellLabel = field(default_factory=lambda: BellLabel(0, 0))
    ancilla_a: int = 7
    ancilla_b: int = 8
    outbound_outcome: BellLabel | None = None
    return_readout: BellLabel | None = None
    detach_outcome: BellLabel | None = None
    inferred_alice: BellLabel | None = None
    inferred_bob: BellLabel | None = None

    @property
    def ancillas(self) -> tuple[int, int]:
        return (self.ancilla_a, self.ancilla_b)

    def begin_round(self) -> None:
        self.outbound_outcome = None
        self.return_readout = None
        self.detach_outcome = None
        self.inferred_alice = None
        self.inferred_bob = None

    def round_record(self) -> EveRoundRecord:
        if self.inferred_alice is None:
            raise RuntimeError("round not finalized; announcement not yet processed")
        return EveRoundRecord(
            outbound_outcome=self.outbound_outcome,
            return_readout=self.return_readout,
            detach_outcome=self.detach_outcome,
            inferred_alice=self.inferred_alice,
            inferred_bob=self.inferred_bob,
        )

    def tapped_link_label(self) -> BellLabel:
        """Label binding Alice's retained link qubit to ancilla A after the
        outbound swap; Eve computes it from public data plus her outcome."""
        return self.link_label ^ self.ancilla_label ^ self.outbound_outcome


def eve_intercept_outbound(
    eve: EveState,
    tap: ChannelTap,
    ledger: KnowledgeLedger,
    force: BellLabel | None = None,
) -> BellLabel:
    """Swap the outbound qubit onto ancilla B while it crosses the channel.

    Leaves (transit, ancilla B) in the measured state and silently
    entangles Alice's retained link qubit with ancilla A. The qubit then
    continues to Bob looking untouched.
    """
    if eve.outbound_outcome is not None:
        raise RuntimeError("outbound transmission already intercepted this round")
    outcome = tap.bsm(tap.transit, eve.ancilla_b, force=force)
    ledger.record_swap(tap.transit, eve.ancilla_b, Party.EVE)
    eve.outbound_outcome = outcome
    return outcome


def eve_intercept_return(
    eve: EveState,
    tap: ChannelTap,
    ledger: KnowledgeLedger,
    force_detach: BellLabel | None = None,
) -> tuple[BellLabel, BellLabel]:
    """Intercept the returning qubit; learn Bob's secret; detach ancillas.

    The returning qubit is already partnered with ancilla B (Bob's secret
    measurement induced that pair), so the first measurement is a
    deterministic readout that, combined with Eve's outbound outcome and
    the public labels, reveals Bob's result. The follow-up measurement on
    (ancilla A, ancilla B) then throws the correlation back onto the two
    qubits Alice is about to compare.
    """
    if eve.outbound_outcome is None:
        raise RuntimeError("return interception requires the outbound swap first")
    if eve.return_readout is not None:
        raise RuntimeError("return transmission already intercepted this round")
    if not tap.are_partners(tap.transit, eve.ancilla_b):
        # her outbound swap guarantees this pairing once Bob has measured
        raise RuntimeError("secret measurements not yet done; nothing to read out")
    readout = tap.bsm(tap.transit, eve.ancilla_b)
    ledger.record_readout(tap.transit, eve.ancilla_b, Party.EVE)
    eve.return_readout = readout
    eve.inferred_bob = readout ^ eve.bob_label ^ eve.outbound_outcome
    detach = tap.bsm(eve.ancilla_a, eve.ancilla_b, force=force_detach)
    ledger.record_swap(eve.ancilla_a, eve.ancilla_b, Party.EVE)
    eve.detach_outcome = detach
    return readout, detach


def eve_finalize(eve: EveState, announcement: BellLabel) -> BellLabel:
    """Reconstruct Alice's secret from her public announcement.

    The announcement reads out the pair Eve's detaching measurement
    created, so she can unwind it to the label that linked Alice's anchor
    qubit to ancilla A, and from there to Alice's secret result.
    """
    if eve.return_readout is None or eve.detach_outcome is None:
        raise RuntimeError("cannot finalize before both interceptions")
    anchor_tap = announcement ^ eve.return_readout ^ eve.detach_outcome
    eve.inferred_alice = anchor_tap ^ eve.anchor_label ^ eve.tapped_link_label()
    return eve.inferred_alice


def eve_reset(eve: EveState, table: PairTable, ledger: KnowledgeLedger):
    """Rotate the ancilla pair back to Eve's preparation label.

    After the detaching measurement the ancillas are partners again in a
    state Eve knows, so a single-qubit correction re-arms the attack.
    """
    if eve.detach_outcome is None:
        raise RuntimeError("ancillas are not in a known post-round state")
    ledger.require_knowledge(eve.ancilla_a, eve.ancilla_b, Party.EVE, "rotate")
    op = pauli_correction(eve.detach_outcome, eve.ancilla_label)
    table.apply_pauli(eve.ancilla_a, op)
    return op
