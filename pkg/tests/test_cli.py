"""Command-line surface: exit codes, transcript files, determinism."""

import json
import subprocess
import sys

import pytest

from swapqkd import analysis, transcript
from swapqkd.cli import main
from swapqkd.protocol import SessionConfig, run_session
from swapqkd.rng import COIN, stream


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def make_file(rounds=20, seed=7, eve=False, test_fraction=0.0):
    cfg_kwargs = dict(rounds=rounds, seed=seed, eve_enabled=eve, test_fraction=test_fraction)
    result = run_session(SessionConfig(**cfg_kwargs))
    rate = analysis.rate_report(result)
    test = None
    if test_fraction > 0:
        test = analysis.eavesdropping_test(result, test_fraction, stream(seed, COIN))
    return transcript.TranscriptFile(transcript=result, rate=rate, test=test)


class TestTranscriptRoundTrip:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(),
            dict(eve=True),
            dict(eve=True, test_fraction=0.25),
            dict(rounds=0),
        ],
    )
    def test_parse_inverts_emit(self, kwargs):
        original = make_file(**kwargs)
        lines = transcript.emit_lines(original)
        parsed = transcript.parse_lines(lines)
        assert parsed.transcript == original.transcript
        assert parsed.rate == original.rate
        assert parsed.test == original.test
        assert transcript.emit_lines(parsed) == lines

    def test_header_and_summary_required(self):
        lines = transcript.emit_lines(make_file())
        with pytest.raises(ValueError, match="header"):
            transcript.parse_lines(lines[1:])
        with pytest.raises(ValueError, match="summary"):
            transcript.parse_lines(lines[:-1])

    def test_labels_serialize_as_two_digit_strings(self):
        lines = transcript.emit_lines(make_file(rounds=1))
        row = json.loads(lines[1])
        assert row["alice_secret"] in {"00", "01", "10", "11"}

    def test_csv_projection_shape(self):
        lines = transcript.csv_lines(make_file(rounds=3, eve=True))
        assert lines[0].split(",") == list(transcript.CSV_COLUMNS)
        assert len(lines) == 4
        assert all(len(line.split(",")) == len(transcript.CSV_COLUMNS) for line in lines)


class TestRunCommand:
    def test_writes_parseable_transcript(self, capsys):
        code, out, err = run_cli(capsys, "run", "--rounds", "100", "--seed", "7")
        assert code == 0
        parsed = transcript.parse_lines(out.splitlines())
        assert len(parsed.transcript.alice_key) == 200
        assert parsed.rate.rate == 1.0
        assert parsed.test is None
        assert "rate: 1.0" in err

    def test_zero_rounds_degenerate(self, capsys):
        code, out, err = run_cli(capsys, "run", "--rounds", "0", "--seed", "7")
        assert code == 0
        parsed = transcript.parse_lines(out.splitlines())
        assert parsed.transcript.rounds == []
        assert parsed.rate.rate is None
        assert "n/a" in err

    def test_eve_run_detection_summary(self, capsys):
        code, out, err = run_cli(
            capsys, "run", "--rounds", "200", "--seed", "7", "--eve",
            "--test-fraction", "0.1",
        )
        assert code == 0
        parsed = transcript.parse_lines(out.splitlines())
        assert parsed.test is not None
        assert parsed.test.eve_detected
        assert "EVE DETECTED" in err

    def test_byte_identical_reruns(self, tmp_path, capsys):
        args = [
            "run", "--rounds", "50", "--seed", "7", "--eve",
            "--test-fraction", "0.2",
        ]
        code1, _, _ = run_cli(capsys, *args, "--out", str(tmp_path / "a.jsonl"))
        code2, _, _ = run_cli(capsys, *args, "--out", str(tmp_path / "b.jsonl"))
        assert code1 == code2 == 0
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", "--rounds", "3", "--seed", "7", "--format", "csv"
        )
        assert code == 0
        assert out.splitlines()[0].startswith("index,alice_secret")

    def test_custom_labels(self, capsys):
        code, out, _ = run_cli(
            capsys, "run", "--rounds", "5", "--seed", "7",
            "--labels", "00", "00", "00",
        )
        assert code == 0
        header = json.loads(out.splitlines()[0])
        assert header["config"]["initial_labels"] == ["00", "00", "00"]

    def test_bad_label_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--rounds", "1", "--seed", "7", "--labels", "0x", "10", "10"])
        assert exc.value.code == 2

    def test_bad_fraction_is_usage_error(self, capsys):
        code, _, err = run_cli(
            capsys, "run", "--rounds", "1", "--seed", "7", "--test-fraction", "2.0"
        )
        assert code == 2
        assert "error" in err

    def test_unwritable_path_is_io_error(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "run", "--rounds", "1", "--seed", "7",
            "--out", str(tmp_path / "missing" / "x.jsonl"),
        )
        assert code == 3
        assert "cannot write" in err

    def test_outdir_env_var(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("SWAPQKD_OUTDIR", str(tmp_path))
        code, _, _ = run_cli(capsys, "run", "--rounds", "1", "--seed", "7",
                             "--out", "nested.jsonl")
        assert code == 0
        assert (tmp_path / "nested.jsonl").exists()


class TestVerifyOracleCommand:
    def test_clean_build_verifies(self, capsys):
        code, out, _ = run_cli(capsys, "verify-oracle")
        assert code == 0
        assert "64/64 cases verified" in out

    def test_injected_fault_detected(self, capsys):
        code, out, _ = run_cli(capsys, "verify-oracle", "--inject-fault")
        assert code == 1
        assert "DISCREPANCY" in out
        assert "00,00,00" in out.replace("(", "").replace(")", "") or "0000" in out


class TestCurvesCommand:
    def test_single_pair_row(self, capsys):
        code, out, _ = run_cli(capsys, "curves", "--max-pairs", "1")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "N,scheme_prob,bb84_prob,empirical,stderr"
        assert lines[1] == "2,0.75,0.4375,,"

    def test_zero_pairs_rejected(self, capsys):
        code, _, err = run_cli(capsys, "curves", "--max-pairs", "0")
        assert code == 2
        assert "at least 1" in err

    def test_empirical_needs_seed(self, capsys):
        code, _, err = run_cli(capsys, "curves", "--max-pairs", "2", "--sessions", "10")
        assert code == 2

    def test_columns_monotone(self, capsys):
        code, out, _ = run_cli(capsys, "curves", "--max-pairs", "6")
        rows = [line.split(",") for line in out.splitlines()[1:]]
        scheme = [float(r[1]) for r in rows]
        other = [float(r[2]) for r in rows]
        assert scheme == sorted(scheme)
        assert other == sorted(other)


class TestMonteCarloCommand:
    def test_small_sweep(self, capsys):
        code, out, err = run_cli(
            capsys, "montecarlo", "--max-pairs", "2", "--sessions", "200", "--seed", "9"
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "pairs,bits,sessions,empirical,expected,stderr,z"
        assert len(lines) == 3
        assert "max |z|" in err

    def test_bad_args(self, capsys):
        code, _, _ = run_cli(capsys, "montecarlo", "--max-pairs", "0", "--seed", "9")
        assert code == 2


class TestEntryPoints:
    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "swapqkd", "run", "--rounds", "2", "--seed", "1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert '"kind":"header"' in proc.stdout
