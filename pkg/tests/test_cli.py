from __future__ import annotations

import json
from pathlib import Path

import pytest

from usher.cli import main

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "src" / "usher" / "scenarios"


def test_validate_bundled_passes(capsys):
    rc = main(["validate", str(SCENARIO_DIR / "parents_anniversary.json"),
               str(SCENARIO_DIR / "sibling_bmovie.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("unique solution: yes") == 2


def test_validate_two_solution_fixture(tmp_path, capsys):
    doc = json.loads((SCENARIO_DIR / "family_matinee.json").read_text())
    doc["scriptedPreferences"] = [p for p in doc["scriptedPreferences"]
                                  if p["stage"] != "time"]
    # Without the end-time bound both PG movies thread through.
    fixture = tmp_path / "two_solutions.json"
    fixture.write_text(json.dumps(doc))
    rc = main(["validate", str(fixture)])
    out = capsys.readouterr().out
    assert rc == 1
    assert "unique solution: no" in out
    assert out.count("witness:") >= 2


def test_validate_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    rc = main(["validate", str(bad)])
    assert rc == 2
    assert "parse error" in capsys.readouterr().out


def test_run_optimal_persona_row(capsys):
    rc = main(["run", "--persona", "parents_optimal"])
    out = capsys.readouterr().out
    assert rc == 0
    header, row = out.strip().splitlines()[:2]
    columns = dict(zip(header.split("\t"), row.split("\t")))
    assert columns["taskSuccess"] == "1"
    assert columns["violationCount"] == "0"
    assert columns["mode"] == "maestro"


def test_run_twice_identical_transcript_bytes(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--persona", "sibling_optimal", "--out", str(out_a)]) == 0
    assert main(["run", "--persona", "sibling_optimal", "--out", str(out_b)]) == 0
    name = "sibling_bmovie__sibling_optimal__maestro.jsonl"
    assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_run_baseline_has_no_adaptation_events(tmp_path):
    # Click-only persona: scripts that lean on backtrack proposals strand in
    # baseline mode, which has no navigation guidance.
    out = tmp_path / "base"
    assert main(["run", "--persona", "parents_repeat", "--mode", "baseline",
                 "--out", str(out)]) == 0
    path = out / "parents_anniversary__parents_repeat__baseline.jsonl"
    kinds = {json.loads(line).get("kind") for line in path.read_text().splitlines()}
    assert "adaptation" not in kinds


def test_replay_fresh_transcript_empty_diff(tmp_path, capsys):
    out = tmp_path / "t"
    main(["run", "--persona", "family_optimal", "--out", str(out)])
    capsys.readouterr()
    transcript = out / "family_matinee__family_optimal__maestro.jsonl"
    rc = main(["replay", str(transcript)])
    assert rc == 0
    assert "replay matches" in capsys.readouterr().out


def test_replay_detects_divergence(tmp_path, capsys):
    out = tmp_path / "t"
    main(["run", "--persona", "family_optimal", "--out", str(out)])
    transcript = out / "family_matinee__family_optimal__maestro.jsonl"
    lines = transcript.read_text().splitlines()
    mutated = []
    flipped = False
    for line in lines:
        doc = json.loads(line)
        if not flipped and doc.get("type") == "event" and doc["kind"] == "message":
            doc["payload"] = {"text": "tampered"}
            flipped = True
        mutated.append(json.dumps(doc, sort_keys=True))
    transcript.write_text("\n".join(mutated) + "\n")
    capsys.readouterr()
    rc = main(["replay", str(transcript)])
    out_text = capsys.readouterr().out
    assert rc == 1
    assert "diff at event" in out_text


def test_replay_truncated_reports_absence(tmp_path, capsys):
    out = tmp_path / "t"
    main(["run", "--persona", "family_optimal", "--out", str(out)])
    transcript = out / "family_matinee__family_optimal__maestro.jsonl"
    lines = transcript.read_text().splitlines()
    transcript.write_text("\n".join(lines[:10]) + "\n")
    capsys.readouterr()
    rc = main(["replay", str(transcript)])
    out_text = capsys.readouterr().out
    assert rc == 1
    assert "absent" in out_text


def test_bad_flag_exits_2():
    assert main(["run", "--nonsense"]) == 2


def test_unknown_persona_errors():
    with pytest.raises(SystemExit):
        main(["run", "--persona", "ghost_persona"])


def test_empty_scenario_dir_warns_and_serves_empty(tmp_path, caplog):
    from usher.cli import _load_scenarios
    with caplog.at_level("WARNING"):
        scenarios = _load_scenarios(str(tmp_path))
    assert scenarios == {}
    assert any("no scenarios" in m for m in caplog.messages)
