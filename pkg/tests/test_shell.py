from __future__ import annotations

import json
import subprocess
import sys
import threading
from pathlib import Path

import pytest
import requests

from hearth import api, scenario, timeutil
from hearth.config import Config
from hearth.diarization import Role
from hearth.engine import Engine

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"


def replay_into(tmp_path, name, sub="run", offline=True, seed=7):
    config = Config(offline=offline, seed=seed, data_dir=str(tmp_path / sub))
    return scenario.replay(SCENARIOS / name, config, data_dir=str(tmp_path / sub))


def store_bytes(data_dir: Path) -> dict[str, bytes]:
    return {
        p.name: p.read_bytes()
        for p in sorted(Path(data_dir).iterdir())
        if p.suffix in (".log", ".mem")
    }


class TestScenarioParsing:
    def test_bad_timestamp(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text("not-a-time clock\n", encoding="utf-8")
        with pytest.raises(scenario.ParseError) as err:
            scenario.parse_scenario(bad)
        assert "line 1" in str(err.value)

    def test_unknown_kind(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text("2026-01-01T00:00:00 frobnicate\n", encoding="utf-8")
        with pytest.raises(scenario.ParseError):
            scenario.parse_scenario(bad)

    def test_unordered_timestamps(self, tmp_path):
        bad = tmp_path / "bad.scn"
        bad.write_text(
            "2026-01-02T00:00:00 clock\n2026-01-01T00:00:00 clock\n", encoding="utf-8"
        )
        with pytest.raises(scenario.UnorderedScenario):
            scenario.parse_scenario(bad)

    def test_comments_and_blanks_skipped(self, tmp_path):
        ok = tmp_path / "ok.scn"
        ok.write_text("# comment\n\n2026-01-01T00:00:00 clock\n", encoding="utf-8")
        assert len(scenario.parse_scenario(ok)) == 1

    def test_empty_scenario_is_empty_run(self, tmp_path):
        empty = tmp_path / "empty.scn"
        empty.write_text("# nothing\n", encoding="utf-8")
        engine = scenario.replay(empty, Config(offline=True, data_dir=str(tmp_path / "d")))
        assert engine.action_records == []
        engine.close()


class TestReplayDeterminism:
    @pytest.mark.parametrize(
        "name", ["doctor_visit.scn", "john_nights.scn", "three_speakers.scn"]
    )
    def test_two_runs_byte_identical(self, tmp_path, name):
        a = replay_into(tmp_path, name, "a")
        b = replay_into(tmp_path, name, "b")
        a.close()
        b.close()
        files_a = store_bytes(tmp_path / "a")
        files_b = store_bytes(tmp_path / "b")
        assert files_a.keys() == files_b.keys()
        for fname in files_a:
            assert files_a[fname] == files_b[fname], f"{fname} differs between runs"

    def test_golden_action_log(self, tmp_path):
        engine = replay_into(tmp_path, "doctor_visit.scn", offline=False)
        engine.close()
        got = (tmp_path / "run" / "actions.log").read_bytes()
        want = (SCENARIOS / "golden" / "doctor_visit.actions.log").read_bytes()
        assert got == want

    def test_golden_john_nights(self, tmp_path):
        engine = replay_into(tmp_path, "john_nights.scn")
        engine.close()
        got = (tmp_path / "run" / "actions.log").read_bytes()
        want = (SCENARIOS / "golden" / "john_nights.actions.log").read_bytes()
        assert got == want


@pytest.fixture
def server(tmp_path):
    config = Config(offline=True, data_dir=str(tmp_path / "api"), port=0)
    engine = Engine(config, data_dir=str(tmp_path / "api"))
    engine.advance_clock(timeutil.parse_timestamp("2026-03-10T08:00:00"))
    engine.enroll("Alice", Role.OWNER)
    engine.enroll("Hilda", Role.HOUSEKEEPER)
    srv = api.serve(engine, host="127.0.0.1", port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base, engine
    srv.shutdown()
    srv.server_close()
    engine.close()


def ndjson(response):
    return [json.loads(line) for line in response.text.splitlines() if line]


class TestApi:
    def test_config_echo(self, server):
        base, engine = server
        got = requests.get(f"{base}/config").json()
        assert got == engine.config.to_dict()

    def test_unknown_speaker_triggers_ask_name(self, server):
        base, _ = server
        r = requests.post(f"{base}/utterance", json={"speaker": "newguy", "text": "hello"})
        assert r.status_code == 200
        feed = ndjson(requests.get(f"{base}/actions?cursor=0"))
        kinds = [row["kind"] for row in feed]
        assert "ask_question" in kinds
        ask = next(row for row in feed if row["kind"] == "ask_question")
        assert ask["text"] == "May I ask your name?"

    def test_promotion_flow_updates_roster(self, server):
        base, _ = server
        requests.post(f"{base}/utterance", json={"speaker": "newguy", "text": "hello"})
        requests.post(
            f"{base}/utterance",
            json={"speaker": "newguy", "text": "Grace, guest", "marker": "ask_name"},
        )
        stats = requests.get(f"{base}/stats").json()
        names = [s["name"] for s in stats["speakers"]]
        assert "Grace" in names
        assert stats["clusters"] == []

    def test_actions_cursor_is_incremental(self, server):
        base, _ = server
        requests.post(f"{base}/utterance", json={"speaker": "Alice", "text": "hi",
                                                 "marker": "silent"})
        full = ndjson(requests.get(f"{base}/actions?cursor=0"))
        later = ndjson(requests.get(f"{base}/actions?cursor={len(full)}"))
        assert later == []
        requests.post(f"{base}/utterance", json={"speaker": "Alice", "text": "more",
                                                 "marker": "silent"})
        tail = ndjson(requests.get(f"{base}/actions?cursor={len(full)}"))
        assert len(tail) >= 1
        assert all(row["seq"] >= len(full) for row in tail)

    def test_memory_search_matches_engine(self, server):
        base, engine = server
        requests.post(f"{base}/utterance", json={"speaker": "Alice", "marker": "silent",
                                                 "text": "the garden gate squeaks at dawn"})
        got = ndjson(requests.get(f"{base}/memory/search", params={"q": "garden gate", "k": 3}))
        want = engine.memory_search("garden gate", 3)
        assert [row["item_id"] for row in got] == [item.item_id for item, _ in want]
        assert [row["similarity"] for row in got] == [sim for _, sim in want]

    def test_summary_roles(self, server):
        base, engine = server
        engine.open_session("visit")
        requests.post(f"{base}/utterance", json={"speaker": "Alice", "marker": "silent",
                                                 "text": "my knee aches"})
        ok = requests.get(f"{base}/summary", params={"session": "visit", "role": "caregiver"})
        assert ok.status_code == 200 and "knee" in ok.json()["summary"]
        status_only = requests.get(
            f"{base}/summary", params={"session": "visit", "role": "housekeeper"}
        )
        assert "knee" not in status_only.json()["summary"]
        denied = requests.get(f"{base}/summary", params={"session": "visit", "role": "guest"})
        assert denied.status_code == 403
        assert denied.json()["error"] == "permission_denied"
        missing = requests.get(f"{base}/summary", params={"session": "nope", "role": "caregiver"})
        assert missing.status_code == 404

    def test_transcripts_endpoint(self, server):
        base, engine = server
        engine.open_session("visit")
        requests.post(f"{base}/utterance", json={"speaker": "Alice", "marker": "silent",
                                                 "text": "one"})
        requests.post(f"{base}/utterance", json={"speaker": "Alice", "marker": "silent",
                                                 "text": "two"})
        rows = ndjson(requests.get(f"{base}/transcripts", params={"session": "visit"}))
        assert [r["text"] for r in rows] == ["one", "two"]
        assert rows[0]["t_start"] <= rows[1]["t_start"]

    def test_sensors_and_stats(self, server):
        base, _ = server
        requests.post(f"{base}/sensors", json={"kind": "motion", "room": "kitchen", "value": 1})
        requests.post(f"{base}/clock", json={"timestamp": "2026-03-10T09:00:00"})
        stats = requests.get(f"{base}/stats").json()
        assert stats["occupancy_seconds"].get("kitchen", 0) > 0
        assert stats["egress_invocations"] == 0

    def test_clock_cannot_go_backwards(self, server):
        base, _ = server
        r = requests.post(f"{base}/clock", json={"timestamp": "2020-01-01T00:00:00"})
        assert r.status_code == 400

    def test_segments_endpoint(self, server):
        base, _ = server
        r = requests.post(
            f"{base}/segments",
            json={"segments": [
                {"truth": "Alice", "t_start": 0.0, "t_end": 1.0, "noise": 0.1},
                {"truth": "Alice", "t_start": 1.0, "t_end": 2.0, "noise": 0.1},
            ]},
        )
        assert r.status_code == 200
        body = r.json()
        assert [a["kind"] for a in body["assignments"]] == ["registered", "registered"]

    def test_unknown_endpoint_404(self, server):
        base, _ = server
        assert requests.get(f"{base}/nope").status_code == 404


def run_cli(*args, cwd=REPO):
    return subprocess.run(
        [sys.executable, "-m", "hearth", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
        env={"PYTHONPATH": str(REPO / "src"), "PATH": "/usr/bin:/bin"},
    )


class TestCli:
    def test_replay_missing_file_exit_1(self):
        result = run_cli("replay", "missing.file")
        assert result.returncode == 1
        assert "missing.file" in result.stderr

    def test_usage_error_exit_2(self):
        result = run_cli("replay")  # missing positional
        assert result.returncode == 2

    def test_offline_replay_has_empty_audit(self, tmp_path):
        data = tmp_path / "run"
        result = run_cli(
            "--offline", "replay", str(SCENARIOS / "doctor_visit.scn"),
            "--data-dir", str(data),
        )
        assert result.returncode == 0, result.stderr
        assert "egress invocations: 0" in result.stdout
        audit = (data / "egress_audit.log").read_text(encoding="utf-8")
        assert [l for l in audit.splitlines() if not l.startswith("#")] == []

    def test_diarize_prints_der_matching_compute(self):
        result = run_cli("diarize", str(SCENARIOS / "three_speakers.scn"))
        assert result.returncode == 0, result.stderr
        assert "DER: 0.0000" in result.stdout

    def test_fuse_prints_stats(self, tmp_path):
        scn = tmp_path / "day.scn"
        scn.write_text(
            "2026-03-12T08:00:00 clock\n"
            "2026-03-12T08:00:01 sensor motion kitchen 1\n"
            "2026-03-12T08:00:02 sensor door kitchen 1\n"
            "2026-03-12T12:00:00 sensor motion bedroom 1\n"
            "2026-03-12T13:00:00 clock\n",
            encoding="utf-8",
        )
        result = run_cli("fuse", str(scn))
        assert result.returncode == 0, result.stderr
        assert "kitchen" in result.stdout
        assert "cooking" in result.stdout

    def test_rules_check(self, tmp_path):
        rules = tmp_path / "rules.json"
        rules.write_text(
            json.dumps([{
                "rule_id": "r1",
                "predicate": {"label": "toileting", "tod_start": "23:00", "tod_end": "06:00"},
                "n_min": 3, "window_nights": 7, "m_min": 5, "cooldown_days": 3,
                "action": "recommend_doctor",
            }]),
            encoding="utf-8",
        )
        result = run_cli("rules", "check", str(rules))
        assert result.returncode == 0
        assert "r1" in result.stdout
        bad = tmp_path / "bad.json"
        bad.write_text("{\"not\": \"a list\"}", encoding="utf-8")
        assert run_cli("rules", "check", str(bad)).returncode == 1

    def test_config_file_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"theta_reg": 0.8, "seed": 99}), encoding="utf-8")
        scn = tmp_path / "mini.scn"
        scn.write_text("2026-01-01T08:00:00 clock\n", encoding="utf-8")
        result = run_cli("--config", str(cfg), "replay", str(scn))
        assert result.returncode == 0, result.stderr
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"theta_reg": 0.3, "theta_anon": 0.9}), encoding="utf-8")
        assert run_cli("--config", str(bad), "replay", str(scn)).returncode == 1

    def test_memory_search_cli(self, tmp_path):
        data = tmp_path / "mem"
        scn = tmp_path / "seed.scn"
        scn.write_text(
            "2026-03-12T08:00:00 clock\n"
            "2026-03-12T08:00:01 doc domain_doc the boiler manual says bleed the radiators yearly\n",
            encoding="utf-8",
        )
        assert run_cli("replay", str(scn), "--data-dir", str(data)).returncode == 0
        result = run_cli(
            "memory", "search", "boiler radiators", "--data-dir", str(data),
            "--now", "2026-03-12T09:00:00",
        )
        assert result.returncode == 0, result.stderr
        assert "boiler" in result.stdout

    def test_memory_delete_is_the_only_permanent_removal_path(self, tmp_path):
        data = tmp_path / "mem"
        scn = tmp_path / "seed.scn"
        scn.write_text(
            "2026-03-12T08:00:00 clock\n"
            "2026-03-12T08:00:01 doc domain_doc a permanent fact to forget\n",
            encoding="utf-8",
        )
        assert run_cli("replay", str(scn), "--data-dir", str(data)).returncode == 0
        from hearth.memory import Source, item_id_for

        item_id = item_id_for("a permanent fact to forget", Source.DOMAIN_DOC)
        result = run_cli("memory", "delete", item_id, "--data-dir", str(data))
        assert result.returncode == 0, result.stderr
        gone = run_cli(
            "memory", "search", "permanent fact forget", "--data-dir", str(data),
            "--now", "2026-03-12T09:00:00",
        )
        assert item_id not in gone.stdout
        assert run_cli("memory", "delete", item_id, "--data-dir", str(data)).returncode == 1
