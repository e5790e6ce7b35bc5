from __future__ import annotations

import json

import pytest

from loomcast.cli import main

pytestmark = pytest.mark.usefixtures("fixtures_dir")


def run_cli(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestValidate:
    def test_fixture_ok(self, capsys, fixtures_dir):
        code, out = run_cli(capsys, "validate", str(fixtures_dir / "goodnight_moon.story"))
        assert code == 0
        assert "11 steps" in out

    def test_corrupt_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.story"
        bad.write_text('{"format_version": 1, "title": 7}')
        code, out = run_cli(capsys, "validate", str(bad))
        assert code == 1
        assert "$.title" in out

    def test_duplicate_keywords_warn_but_pass(self, capsys, tmp_path, fixtures_dir):
        doc = json.loads((fixtures_dir / "goodnight_moon.story").read_text())
        doc["steps"][1]["trigger"]["phrase"] = doc["steps"][0]["trigger"]["phrase"]
        path = tmp_path / "dup.story"
        path.write_text(json.dumps(doc))
        code, out = run_cli(capsys, "validate", str(path))
        assert code == 0
        assert "duplicate keyword" in out

    def test_missing_file(self, capsys, tmp_path):
        code, _ = run_cli(capsys, "validate", str(tmp_path / "nope.story"))
        assert code == 2


class TestPlay:
    def test_goodnight_moon_transcript(self, capsys, fixtures_dir):
        code, out = run_cli(capsys, "play", str(fixtures_dir / "goodnight_moon.story"),
                            "--simulate", "--transcript",
                            str(fixtures_dir / "goodnight_moon.transcript"))
        assert code == 0
        assert "story finished after 11 transitions" in out
        assert out.count("-> scene") == 11

    def test_ben_franklin_touch_flicker_logged(self, capsys, fixtures_dir):
        code, out = run_cli(capsys, "play", str(fixtures_dir / "benjamin_franklin.story"),
                            "--simulate", "--transcript",
                            str(fixtures_dir / "benjamin_franklin.transcript"))
        assert code == 0
        assert "effect=flickering" in out

    def test_missing_keyword_stalls_incomplete(self, capsys, fixtures_dir, tmp_path):
        lines = (fixtures_dir / "goodnight_moon.transcript").read_text().splitlines()
        del lines[4]  # drop the "gentle breeze" line
        partial = tmp_path / "partial.txt"
        partial.write_text("\n".join(lines) + "\n")
        code, out = run_cli(capsys, "play", str(fixtures_dir / "goodnight_moon.story"),
                            "--simulate", "--transcript", str(partial))
        assert code == 1
        assert "incomplete" in out
        assert "gentle breeze" in out

    def test_without_simulate_or_devices_fails(self, capsys, fixtures_dir, monkeypatch):
        monkeypatch.delenv("LOOMCAST_DEVICE_MAP", raising=False)
        code, _ = run_cli(capsys, "play", str(fixtures_dir / "goodnight_moon.story"),
                          "--transcript", str(fixtures_dir / "goodnight_moon.transcript"))
        assert code == 2

    def test_replay_output_is_byte_stable(self, capsys, fixtures_dir):
        outputs = []
        for _ in range(2):
            code, out = run_cli(capsys, "play", str(fixtures_dir / "wind_and_sun.story"),
                                "--simulate", "--transcript",
                                str(fixtures_dir / "wind_and_sun.transcript"))
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1]

    def test_report_dir_writes_artifacts(self, capsys, fixtures_dir, tmp_path):
        out_dir = tmp_path / "report"
        code, _ = run_cli(capsys, "play", str(fixtures_dir / "goodnight_moon.story"),
                          "--simulate", "--transcript",
                          str(fixtures_dir / "goodnight_moon.transcript"),
                          "--report-dir", str(out_dir))
        assert code == 0
        assert (out_dir / "states.tsv").exists()
        assert (out_dir / "timeline.png").exists()
        transitions = (out_dir / "transitions.tsv").read_text().strip().split("\n")
        assert transitions[0] == "timestamp\tstep\tevent\tdetail"
        assert len(transitions) == 1 + 12  # header + start + 11 transitions

    def test_golden_transition_log(self, capsys, fixtures_dir, tmp_path):
        # Logical clock makes the exported log fully deterministic.
        out_dir = tmp_path / "report"
        run_cli(capsys, "play", str(fixtures_dir / "wind_and_sun.story"),
                "--simulate", "--transcript", str(fixtures_dir / "wind_and_sun.transcript"),
                "--report-dir", str(out_dir))
        got = (out_dir / "transitions.tsv").read_text()
        expected_rows = ["timestamp\tstep\tevent\tdetail", "0.000\t-1\tstart\t"]
        expected_rows += [f"{i + 1}.000\t{i}\ttap\ttap" for i in range(6)]
        assert got == "\n".join(expected_rows) + "\n"


class TestReport:
    def test_report_subcommand(self, capsys, fixtures_dir, tmp_path):
        out_dir = tmp_path / "r"
        code, out = run_cli(capsys, "report", str(fixtures_dir / "wind_and_sun.story"),
                            "--out", str(out_dir))
        assert code == 0
        states = (out_dir / "states.tsv").read_text()
        assert "scene\tkind\tid\tfield\tvalue" in states
        # fan ramps to 3 in scene 2: row present in the delimited output
        assert "2\tfan\tfan\tintensity\t3" in states
        assert (out_dir / "timeline.png").stat().st_size > 0


class TestFixturesCommand:
    def test_writes_canonical_files(self, capsys, tmp_path, fixtures_dir):
        code, _ = run_cli(capsys, "fixtures", "--out", str(tmp_path))
        assert code == 0
        for name in ("goodnight_moon", "benjamin_franklin", "wind_and_sun"):
            fresh = (tmp_path / f"{name}.story").read_text()
            shipped = (fixtures_dir / f"{name}.story").read_text()
            assert fresh == shipped, name
            assert (tmp_path / f"{name}.transcript").read_text() == \
                (fixtures_dir / f"{name}.transcript").read_text()


class TestFixtureEnvOverride:
    def test_bare_name_resolves_via_env(self, capsys, fixtures_dir, monkeypatch):
        monkeypatch.setenv("LOOMCAST_FIXTURES", str(fixtures_dir))
        code, out = run_cli(capsys, "validate", "goodnight_moon")
        assert code == 0
        assert "11 steps" in out
