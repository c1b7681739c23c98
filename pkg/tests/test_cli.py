import json
import subprocess
import sys

import pytest

from promptmixer.cli import main, parse_script
from promptmixer.errors import MixerError

SCRIPT = """\
# demo session
place 0 0 ocean
place 0 1 dream
preset Cynic
set sarcasm 1.0
submit
"""


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompileCommand:
    def test_prints_canonical_chain(self, capsys):
        code, out, _ = run_cli(["compile", "--tiles", "ocean dream"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["messages"][-1] == ["user", "ocean dream"]

    def test_state_file_applied(self, tmp_path, capsys):
        state_file = tmp_path / "state.json"
        state_file.write_text(json.dumps({"length": 0.0, "mode": 2}),
                              encoding="utf-8")
        code, out, _ = run_cli(["compile", "--state", str(state_file),
                                "--tiles", "ocean"], capsys)
        assert code == 0
        doc = json.loads(out)
        system = doc["messages"][0][1]
        assert "one word" in system.lower()
        assert "critique" in system.lower()

    def test_mixerless_flag(self, capsys):
        code, out, _ = run_cli(["compile", "--tiles", "ocean",
                                "--mixerless"], capsys)
        doc = json.loads(out)
        assert doc["messages"][0] == ["system", ""]
        assert doc["sampling"]["temperature"] is None

    def test_deterministic_across_runs(self, capsys):
        _, first, _ = run_cli(["compile", "--tiles", "blue sky"], capsys)
        _, second, _ = run_cli(["compile", "--tiles", "blue sky"], capsys)
        assert first == second


class TestStubSession:
    def test_scripted_session(self, tmp_path, capsys):
        script = tmp_path / "script.txt"
        script.write_text(SCRIPT, encoding="utf-8")
        log = tmp_path / "session.log"
        code, out, _ = run_cli(["stub-session", str(script),
                                "--log", str(log)], capsys)
        assert code == 0
        assert out.startswith("> ocean dream\n")
        assert len(out.splitlines()) >= 2
        records = [json.loads(line)
                   for line in log.read_text(encoding="utf-8").splitlines()]
        kinds = [r["kind"] for r in records]
        assert kinds == ["tile_placed", "tile_placed", "preset_selected",
                         "control_set", "submitted", "chain_compiled",
                         "response_received"]

    def test_repeatable_byte_identically(self, tmp_path, capsys):
        script = tmp_path / "script.txt"
        script.write_text(SCRIPT, encoding="utf-8")
        outputs, logs = [], []
        for run in range(2):
            log = tmp_path / f"run{run}.log"
            code, out, _ = run_cli(["stub-session", str(script),
                                    "--log", str(log)], capsys)
            assert code == 0
            outputs.append(out)
            logs.append(log.read_bytes())
        assert outputs[0] == outputs[1]
        assert logs[0] == logs[1]

    def test_script_error_reported_with_line(self, tmp_path, capsys):
        script = tmp_path / "script.txt"
        script.write_text("place 0 0 xylophone\n", encoding="utf-8")
        code, _, err = run_cli(["stub-session", str(script),
                                "--log", str(tmp_path / "s.log")], capsys)
        assert code == 1
        assert "unknown_word" in err

    def test_parse_script_rejects_bad_line(self):
        with pytest.raises(MixerError):
            parse_script("warp 9\n")


class TestReplayCommand:
    def test_replay_verifies_session(self, tmp_path, capsys):
        script = tmp_path / "script.txt"
        script.write_text(SCRIPT, encoding="utf-8")
        log = tmp_path / "session.log"
        run_cli(["stub-session", str(script), "--log", str(log)], capsys)
        code, out, _ = run_cli(["replay", str(log)], capsys)
        assert code == 0
        assert "OK" in out

    def test_replay_detects_tampering(self, tmp_path, capsys):
        script = tmp_path / "script.txt"
        script.write_text(SCRIPT, encoding="utf-8")
        log = tmp_path / "session.log"
        run_cli(["stub-session", str(script), "--log", str(log)], capsys)
        tampered = log.read_text(encoding="utf-8").replace("ocean dream",
                                                           "storm cloud")
        log.write_text(tampered, encoding="utf-8")
        code, out, err = run_cli(["replay", str(log)], capsys)
        assert code == 1
        assert "MISMATCH" in out


class TestConsoleScript:
    def test_entry_point_runs(self, tmp_path):
        script = tmp_path / "script.txt"
        script.write_text(SCRIPT, encoding="utf-8")
        log = tmp_path / "session.log"
        proc = subprocess.run(
            [sys.executable, "-m", "promptmixer.cli", "stub-session",
             str(script), "--log", str(log)],
            capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0
        assert proc.stdout.startswith("> ocean dream")
