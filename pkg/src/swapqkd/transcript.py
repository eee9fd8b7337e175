"""Line-delimited JSON transcripts and their CSV projection.

A transcript file is one JSON object per line: a header echoing the
configuration, one record per round (with the eavesdropper's section when
she was enabled), and a trailing summary holding the rate report and the
eavesdropping-test report. Emission is deterministic: rerunning the same
configuration and seed reproduces the file byte for byte, and
`parse_lines(emit_lines(...))` returns equal objects.

Bell labels serialize as the two-character strings "00".."11".
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import __version__
from .adversary import EveRoundRecord
from .analysis import RateReport, TestReport
from .bell import BellLabel, PauliOp
from .knowledge import Party
from .protocol import Correction, RoundRecord, SessionConfig, SessionTranscript


@dataclass
class TranscriptFile:
    """Everything a transcript file carries, in parsed form."""

    transcript: SessionTranscript
    rate: RateReport
    test: TestReport | None


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


def _config_dict(cfg: SessionConfig) -> dict:
    return {
        "rounds": cfg.rounds,
        "seed": cfg.seed,
        "eve_enabled": cfg.eve_enabled,
        "test_fraction": cfg.test_fraction,
        "initial_labels": [str(lab) for lab in cfg.initial_labels],
        "eve_ancilla": str(cfg.eve_ancilla),
    }


def _config_from(d: dict) -> SessionConfig:
    labels = tuple(BellLabel.from_string(s) for s in d["initial_labels"])
    return SessionConfig(
        rounds=d["rounds"],
        seed=d["seed"],
        eve_enabled=d["eve_enabled"],
        test_fraction=d["test_fraction"],
        initial_labels=labels,
        eve_ancilla=BellLabel.from_string(d["eve_ancilla"]),
    )


def _round_dict(rec: RoundRecord) -> dict:
    eve = None
    if rec.eve is not None:
        eve = {
            "outbound_outcome": str(rec.eve.outbound_outcome),
            "return_readout": str(rec.eve.return_readout),
            "detach_outcome": str(rec.eve.detach_outcome),
            "inferred_alice": str(rec.eve.inferred_alice),
            "inferred_bob": str(rec.eve.inferred_bob),
        }
    return {
        "kind": "round",
        "index": rec.index,
        "alice_secret": str(rec.alice_secret),
        "bob_secret": str(rec.bob_secret),
        "announcement": str(rec.announcement),
        "alice_inferred_bob": str(rec.alice_inferred_bob),
        "bob_inferred_alice": str(rec.bob_inferred_alice),
        "transfers": [[q, direction] for q, direction in rec.transfers],
        "transmissions": rec.transmissions,
        "key_bits": rec.key_bits,
        "eve": eve,
        "corrections": [[c.party.value, c.qubit, c.op.name] for c in rec.corrections],
    }


def _round_from(d: dict) -> RoundRecord:
    eve = None
    if d["eve"] is not None:
        e = d["eve"]
        eve = EveRoundRecord(
            outbound_outcome=BellLabel.from_string(e["outbound_outcome"]),
            return_readout=BellLabel.from_string(e["return_readout"]),
            detach_outcome=BellLabel.from_string(e["detach_outcome"]),
            inferred_alice=BellLabel.from_string(e["inferred_alice"]),
            inferred_bob=BellLabel.from_string(e["inferred_bob"]),
        )
    return RoundRecord(
        index=d["index"],
        alice_secret=BellLabel.from_string(d["alice_secret"]),
        bob_secret=BellLabel.from_string(d["bob_secret"]),
        announcement=BellLabel.from_string(d["announcement"]),
        alice_inferred_bob=BellLabel.from_string(d["alice_inferred_bob"]),
        bob_inferred_alice=BellLabel.from_string(d["bob_inferred_alice"]),
        transfers=tuple((q, direction) for q, direction in d["transfers"]),
        key_bits=d["key_bits"],
        eve=eve,
        corrections=tuple(
            Correction(Party(p), q, PauliOp[op]) for p, q, op in d["corrections"]
        ),
    )


def _summary_dict(
    transcript: SessionTranscript, rate: RateReport, test: TestReport | None
) -> dict:
    test_d = None
    if test is not None:
        test_d = {
            "pairs_tested": test.pairs_tested,
            "bits_tested": test.bits_tested,
            "mismatches": test.mismatches,
            "eve_detected": test.eve_detected,
            "remaining_key": test.remaining_key,
            "remaining_key_bob": test.remaining_key_bob,
            "tested_rounds": list(test.tested_rounds),
            "degenerate": test.degenerate,
        }
    return {
        "kind": "summary",
        "alice_key": transcript.alice_key,
        "bob_key": transcript.bob_key,
        "eve_key": transcript.eve_key,
        "rate": {
            "key_bits": rate.key_bits,
            "transmitted_qubits": rate.transmitted_qubits,
            "rate": rate.rate,
            "bb84_rate": rate.bb84_rate,
            "e91_rate": rate.e91_rate,
        },
        "test": test_d,
    }


def emit_lines(file: TranscriptFile) -> list[str]:
    header = {
        "kind": "header",
        "format": "swapqkd-transcript",
        "version": __version__,
        "config": _config_dict(file.transcript.config),
    }
    lines = [_dump(header)]
    lines.extend(_dump(_round_dict(rec)) for rec in file.transcript.rounds)
    lines.append(_dump(_summary_dict(file.transcript, file.rate, file.test)))
    return lines


def parse_lines(lines) -> TranscriptFile:
    rows = [json.loads(line) for line in lines if line.strip()]
    if not rows or rows[0].get("kind") != "header":
        raise ValueError("transcript must start with a header line")
    if rows[-1].get("kind") != "summary":
        raise ValueError("transcript must end with a summary line")
    config = _config_from(rows[0]["config"])
    rounds = [_round_from(d) for d in rows[1:-1]]
    summary = rows[-1]
    transcript = SessionTranscript(
        config=config,
        rounds=rounds,
        alice_key=summary["alice_key"],
        bob_key=summary["bob_key"],
        eve_key=summary["eve_key"],
    )
    r = summary["rate"]
    rate = RateReport(
        key_bits=r["key_bits"],
        transmitted_qubits=r["transmitted_qubits"],
        rate=r["rate"],
        bb84_rate=r["bb84_rate"],
        e91_rate=r["e91_rate"],
    )
    test = None
    if summary["test"] is not None:
        t = summary["test"]
        test = TestReport(
            pairs_tested=t["pairs_tested"],
            bits_tested=t["bits_tested"],
            mismatches=t["mismatches"],
            eve_detected=t["eve_detected"],
            remaining_key=t["remaining_key"],
            remaining_key_bob=t["remaining_key_bob"],
            tested_rounds=tuple(t["tested_rounds"]),
            degenerate=t["degenerate"],
        )
    return TranscriptFile(transcript=transcript, rate=rate, test=test)


CSV_COLUMNS = (
    "index",
    "alice_secret",
    "bob_secret",
    "announcement",
    "alice_inferred_bob",
    "bob_inferred_alice",
    "key_bits",
    "transmissions",
    "eve_inferred_alice",
    "eve_inferred_bob",
)


def csv_lines(file: TranscriptFile) -> list[str]:
    """Flat per-round projection; drops corrections, transfers, summary."""
    lines = [",".join(CSV_COLUMNS)]
    for rec in file.transcript.rounds:
        eve_a = str(rec.eve.inferred_alice) if rec.eve else ""
        eve_b = str(rec.eve.inferred_bob) if rec.eve else ""
        lines.append(
            f"{rec.index},{rec.alice_secret},{rec.bob_secret},{rec.announcement},"
            f"{rec.alice_inferred_bob},{rec.bob_inferred_alice},{rec.key_bits},"
            f"{rec.transmissions},{eve_a},{eve_b}"
        )
    return lines
