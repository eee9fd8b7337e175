"""Two-party key-distribution rounds over three Bell pairs.

One round, with the six protocol qubits in their role positions:

  1. Alice sends her link partner qubit to Bob over the public channel.
  2. Alice secretly measures (link keep, anchor A); the outcome is her
     secret result and the round's two key bits.
  3. Bob secretly measures (received qubit, his keep).
  4. Bob returns his send qubit; Alice measures (anchor B, returned qubit)
     and announces the result publicly.
  5. Each party XORs the announcement with the three agreed pair labels
     and its own secret to recover the other's secret exactly.

Between rounds each holder rotates its pair back to the agreed labels and
the role map advances, so every round is identically prepared while the
same six physical qubits circulate forever. An enabled eavesdropper
(adversary module) is spliced into both channel transits.

The public announcement leaks only the XOR of the two secrets: four
(alice, bob) combinations stay equally likely to an outside observer,
which `public_posterior` enumerates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import adversary
from .bell import ALL_LABELS, BellLabel, PairTable, PauliOp, pauli_correction
from .knowledge import KnowledgeLedger, LedgerViolation, Party, Visibility
from .rng import RandomStream, round_stream


def _label(s: str) -> BellLabel:
    return BellLabel.from_string(s)


DEFAULT_LABELS = (_label("11"), _label("10"), _label("10"))
"""Agreed (link, anchor, bob) pair labels each round starts from."""


@dataclass(frozen=True)
class RoleMap:
    """Physical qubit playing each protocol role this round.

    Alice holds `alice_keep`, `alice_send` and the two anchor qubits at
    round start; Bob holds `bob_keep` and `bob_send`. `alice_send` crosses
    to Bob in step 1 and `bob_send` comes back in step 4.
    """

    alice_keep: int
    alice_send: int
    anchor_a: int
    anchor_b: int
    bob_keep: int
    bob_send: int

    def qubits(self) -> tuple[int, ...]:
        return (
            self.alice_keep,
            self.alice_send,
            self.anchor_a,
            self.anchor_b,
            self.bob_keep,
            self.bob_send,
        )

    def __post_init__(self):
        if len(set(self.qubits())) != 6:
            raise ValueError(f"role map must name six distinct qubits: {self}")

    def rotated(self) -> "RoleMap":
        """Roles for the next round.

        The secret pair (keep, anchor A) becomes the link pair, the
        announced pair (anchor B, send-back) becomes the anchor, and Bob's
        secret pair becomes his new pair; custody already matches, so no
        extra transmissions are needed.
        """
        return RoleMap(
            alice_keep=self.alice_keep,
            alice_send=self.anchor_a,
            anchor_a=self.anchor_b,
            anchor_b=self.bob_send,
            bob_keep=self.bob_keep,
            bob_send=self.alice_send,
        )


INITIAL_ROLES = RoleMap(
    alice_keep=1, alice_send=2, anchor_a=3, anchor_b=5, bob_keep=4, bob_send=6
)


@dataclass(frozen=True)
class SessionConfig:
    rounds: int
    seed: int
    eve_enabled: bool = False
    test_fraction: float = 0.0
    initial_labels: tuple[BellLabel, BellLabel, BellLabel] = DEFAULT_LABELS
    eve_ancilla: BellLabel = field(default_factory=lambda: _label("00"))

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be nonnegative")
        if not 0.0 <= self.test_fraction <= 1.0:
            raise ValueError("test_fraction must lie in [0, 1]")
        if len(self.initial_labels) != 3:
            raise ValueError("exactly three initial labels: link, anchor, bob")


@dataclass(frozen=True)
class ForcedOutcomes:
    """Replay hooks: pin specific measurement branches of one round.

    `announcement` is honored by steering Bob's secret outcome, since by
    the time Alice measures the announced pair its value is already
    determined; it cannot be combined with `bob_secret` or an enabled
    eavesdropper.
    """

    alice_secret: BellLabel | None = None
    bob_secret: BellLabel | None = None
    announcement: BellLabel | None = None
    eve_outbound: BellLabel | None = None
    eve_detach: BellLabel | None = None


@dataclass
class Correction:
    party: Party
    qubit: int
    op: PauliOp


@dataclass
class RoundRecord:
    index: int
    alice_secret: BellLabel
    bob_secret: BellLabel
    announcement: BellLabel
    alice_inferred_bob: BellLabel
    bob_inferred_alice: BellLabel
    transfers: tuple[tuple[int, str], tuple[int, str]]
    key_bits: str
    eve: adversary.EveRoundRecord | None = None
    corrections: tuple[Correction, ...] = ()

    @property
    def transmissions(self) -> int:
        return len(self.transfers)


@dataclass
class SessionTranscript:
    config: SessionConfig
    rounds: list[RoundRecord]
    alice_key: str
    bob_key: str
    eve_key: str | None = None


def infer_bob_secret(
    link: BellLabel,
    anchor: BellLabel,
    bob: BellLabel,
    alice_secret: BellLabel,
    announcement: BellLabel,
) -> BellLabel:
    """Alice's reconstruction of Bob's secret result.

    Composing the swap rule through both secret measurements shows the
    announcement equals the XOR of all three agreed labels with both
    secrets, so one more XOR isolates Bob's.
    """
    return link ^ anchor ^ bob ^ alice_secret ^ announcement


def infer_alice_secret(
    link: BellLabel,
    anchor: BellLabel,
    bob: BellLabel,
    bob_secret: BellLabel,
    announcement: BellLabel,
) -> BellLabel:
    """Bob's reconstruction of Alice's secret result (symmetric formula)."""
    return link ^ anchor ^ bob ^ bob_secret ^ announcement


def public_posterior(
    link: BellLabel,
    anchor: BellLabel,
    bob: BellLabel,
    announcement: BellLabel,
) -> tuple[tuple[BellLabel, BellLabel], ...]:
    """All (alice_secret, bob_secret) pairs consistent with public data.

    Exactly four, one per possible Alice result, all equally likely to an
    observer who saw only the announcement and the agreed labels.
    """
    xor = link ^ anchor ^ bob ^ announcement
    return tuple((s, s ^ xor) for s in ALL_LABELS)


class Session:
    """Owns the quantum state, custody map, ledger, and keys of one session."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.roles = INITIAL_ROLES
        link, anchor, bob = config.initial_labels
        r = self.roles
        self.table = PairTable(
            [
                (r.alice_keep, r.alice_send, link),
                (r.anchor_a, r.anchor_b, anchor),
                (r.bob_keep, r.bob_send, bob),
            ]
        )
        self.ledger = KnowledgeLedger()
        for a, b, _ in self.table.pairs():
            self.ledger.declare(a, b, Visibility.PUBLIC)
        self.custody: dict[int, Party] = {
            r.alice_keep: Party.ALICE,
            r.alice_send: Party.ALICE,
            r.anchor_a: Party.ALICE,
            r.anchor_b: Party.ALICE,
            r.bob_keep: Party.BOB,
            r.bob_send: Party.BOB,
        }
        self.eve: adversary.EveState | None = None
        if config.eve_enabled:
            self.eve = adversary.EveState(
                link_label=link,
                anchor_label=anchor,
                bob_label=bob,
                ancilla_label=config.eve_ancilla,
            )
            self.table.add_pair(self.eve.ancilla_a, self.eve.ancilla_b, config.eve_ancilla)
            self.ledger.declare(self.eve.ancilla_a, self.eve.ancilla_b, Visibility.EVE_ONLY)
            self.custody[self.eve.ancilla_a] = Party.EVE
            self.custody[self.eve.ancilla_b] = Party.EVE
        self.alice_key = ""
        self.bob_key = ""
        self.eve_key = ""
        self.rounds_run = 0

    # -- round execution ---------------------------------------------------

    def _check_round_preconditions(self):
        r = self.roles
        link, anchor, bob = self.config.initial_labels
        table, custody = self.table, self.custody
        for a, b, want, holder in (
            (r.alice_keep, r.alice_send, link, Party.ALICE),
            (r.anchor_a, r.anchor_b, anchor, Party.ALICE),
            (r.bob_keep, r.bob_send, bob, Party.BOB),
        ):
            if not table.are_partners(a, b):
                raise ValueError(f"malformed state: qubits {a},{b} are not paired")
            if table.label(a) != want:
                raise ValueError(
                    f"malformed state: pair ({a},{b}) holds {table.label(a)}, "
                    f"agreed label is {want}"
                )
            if custody[a] is not holder or custody[b] is not holder:
                raise ValueError(f"malformed state: {holder.value} does not hold {a},{b}")

    def run_round(
        self, randomness: RandomStream, forced: ForcedOutcomes | None = None
    ) -> RoundRecord:
        forced = forced or ForcedOutcomes()
        cfg = self.config
        r = self.roles
        table, ledger = self.table, self.ledger
        self._check_round_preconditions()
        if forced.announcement is not None:
            if cfg.eve_enabled:
                raise ValueError("cannot force the announcement with the eavesdropper on")
            if forced.bob_secret is not None:
                raise ValueError("force either the announcement or Bob's secret, not both")
        if self.eve is not None:
            self.eve.begin_round()

        link, anchor, bob = cfg.initial_labels

        # step 1: link partner crosses to Bob (Eve may tap it in transit)
        if self.eve is not None:
            tap = adversary.ChannelTap(table, randomness, self.eve.ancillas, r.alice_send)
            adversary.eve_intercept_outbound(self.eve, tap, ledger, force=forced.eve_outbound)
        self.custody[r.alice_send] = Party.BOB

        # step 2: Alice's secret measurement
        alice_secret = table.bsm(r.alice_keep, r.anchor_a, randomness, force=forced.alice_secret)
        ledger.record_swap(r.alice_keep, r.anchor_a, Party.ALICE)

        # step 3: Bob's secret measurement
        bob_force = forced.bob_secret
        if forced.announcement is not None:
            # the announced pair's value is fixed once Bob measures; choose
            # his branch so the readout lands on the requested label
            bob_force = (
                table.label(r.alice_send) ^ table.label(r.bob_keep) ^ forced.announcement
            )
        bob_secret = table.bsm(r.alice_send, r.bob_keep, randomness, force=bob_force)
        ledger.record_swap(r.alice_send, r.bob_keep, Party.BOB)

        # step 4: return transit (tapped again), then the public readout
        if self.eve is not None:
            tap = adversary.ChannelTap(table, randomness, self.eve.ancillas, r.bob_send)
            adversary.eve_intercept_return(self.eve, tap, ledger, force_detach=forced.eve_detach)
        self.custody[r.bob_send] = Party.ALICE
        announcement = table.bsm(r.anchor_b, r.bob_send, randomness)
        ledger.record_readout(r.anchor_b, r.bob_send, Party.ALICE)
        ledger.record_announcement(r.anchor_b, r.bob_send)

        # step 5: inference from public data
        alice_inferred_bob = infer_bob_secret(link, anchor, bob, alice_secret, announcement)
        bob_inferred_alice = infer_alice_secret(link, anchor, bob, bob_secret, announcement)
        ledger.record_inference(r.alice_keep, r.anchor_a, Party.BOB)
        ledger.record_inference(r.alice_send, r.bob_keep, Party.ALICE)

        eve_record = None
        if self.eve is not None:
            adversary.eve_finalize(self.eve, announcement)
            eve_record = self.eve.round_record()
            self.eve_key += str(eve_record.inferred_alice)

        record = RoundRecord(
            index=self.rounds_run,
            alice_secret=alice_secret,
            bob_secret=bob_secret,
            announcement=announcement,
            alice_inferred_bob=alice_inferred_bob,
            bob_inferred_alice=bob_inferred_alice,
            transfers=((r.alice_send, "alice_to_bob"), (r.bob_send, "bob_to_alice")),
            key_bits=str(alice_secret),
            eve=eve_record,
        )
        self.alice_key += record.key_bits
        self.bob_key += str(bob_inferred_alice)
        self.rounds_run += 1
        return record

    # -- between rounds ------------------------------------------------------

    def reset_round(self) -> tuple[Correction, ...]:
        """Rotate every pair back to the agreed labels and advance roles.

        Each correcting party must know its pair's current label, which the
        ledger certifies: Alice knows her secret outcome and the announced
        value, Bob knows his secret outcome.
        """
        cfg = self.config
        r = self.roles
        link, anchor, bob = cfg.initial_labels
        plan = (
            (Party.ALICE, r.alice_keep, r.anchor_a, link),
            (Party.ALICE, r.anchor_b, r.bob_send, anchor),
            (Party.BOB, r.bob_keep, r.alice_send, bob),
        )
        corrections = []
        for party, q, partner, target in plan:
            if not self.table.are_partners(q, partner):
                raise ValueError(f"malformed state: qubits {q},{partner} are not paired")
            if self.custody[q] is not party:
                raise LedgerViolation(f"{party.value} does not hold qubit {q}")
            self.ledger.require_knowledge(q, partner, party, "rotate")
            op = pauli_correction(self.table.label(q), target)
            self.table.apply_pauli(q, op)
            # the rotation targets are the public agreed labels
            self.ledger.record_announcement(q, partner)
            corrections.append(Correction(party, q, op))
        if self.eve is not None:
            op = adversary.eve_reset(self.eve, self.table, self.ledger)
            corrections.append(Correction(Party.EVE, self.eve.ancilla_a, op))
        self.roles = r.rotated()
        return tuple(corrections)

    # -- whole session -------------------------------------------------------

    def run(self) -> SessionTranscript:
        records = []
        for i in range(self.config.rounds):
            record = self.run_round(round_stream(self.config.seed, i))
            record.corrections = self.reset_round()
            records.append(record)
        return SessionTranscript(
            config=self.config,
            rounds=records,
            alice_key=self.alice_key,
            bob_key=self.bob_key,
            eve_key=self.eve_key if self.config.eve_enabled else None,
        )


def run_session(config: SessionConfig) -> SessionTranscript:
    """Run a fresh seeded session end to end."""
    return Session(config).run()


def replay_round(
    config: SessionConfig, forced: ForcedOutcomes, randomness: RandomStream | None = None
) -> tuple[RoundRecord, Session]:
    """Run a single round of a fresh session with pinned branches.

    Fully forced rounds need no random stream at all; partially forced
    ones draw the rest from `randomness`.
    """
    session = Session(config)
    if randomness is None:
        randomness = round_stream(config.seed, 0)
    record = session.run_round(randomness, forced)
    return record, session
