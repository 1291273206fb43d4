from __future__ import annotations

from datetime import datetime

import numpy as np
import pytest

from hearth.store import (
    AppendLog,
    OutOfOrderTurn,
    Store,
    StoreCorrupt,
    TranscriptStore,
    TranscriptTurn,
    decode_record,
    encode_record,
)


class TestRecordCodec:
    def test_round_trip_with_escapes(self):
        fields = ["plain", "tab\there", "newline\nhere", "back\\slash", ""]
        assert decode_record(encode_record(fields)) == fields

    def test_corrupt_crc_detected(self):
        line = encode_record(["a", "b"])
        assert decode_record(line[:-2] + "0\n") is None

    def test_truncated_line_detected(self):
        line = encode_record(["some", "fields"])
        for cut in range(1, len(line) - 1):
            assert decode_record(line[:cut]) is None or decode_record(line[:cut]) != ["some", "fields"] or cut == len(line) - 1


class TestAppendLog:
    def test_persist_and_reload(self, tmp_path):
        log = AppendLog(tmp_path / "x.log")
        log.append(["one", "1"])
        log.append(["two", "2"])
        log.close()
        again = AppendLog(tmp_path / "x.log")
        assert again.records() == [["one", "1"], ["two", "2"]]

    def test_torn_final_record_discarded_at_every_byte_boundary(self, tmp_path):
        """Crash simulation: truncate inside the last record, reopen, and the
        store must hold exactly the records written before it."""
        path = tmp_path / "wal.log"
        log = AppendLog(path)
        for i in range(5):
            log.append([f"rec{i}", "payload", str(i)])
        log.close()
        full = path.read_bytes()
        last_line_start = full.rstrip(b"\n").rfind(b"\n") + 1
        # a record is committed iff its terminating newline reached the disk
        for cut in range(last_line_start + 1, len(full)):
            path.write_bytes(full[:cut])
            recovered = AppendLog(path)
            assert len(recovered.records()) == 4
            assert recovered.records()[-1][0] == "rec3"
            recovered.close()

    def test_mid_file_corruption_is_an_error_not_a_skip(self, tmp_path):
        path = tmp_path / "wal.log"
        log = AppendLog(path)
        log.append(["first"])
        log.append(["second"])
        log.close()
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[1] = lines[1][:-1] + ("0" if lines[1][-1] != "0" else "1")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(StoreCorrupt):
            AppendLog(path)

    def test_append_after_recovery_continues_cleanly(self, tmp_path):
        path = tmp_path / "wal.log"
        log = AppendLog(path)
        log.append(["a"])
        log.close()
        with open(path, "ab") as fh:
            fh.write(b"torn-partial-record")
        recovered = AppendLog(path)
        assert recovered.records() == [["a"]]
        recovered.append(["b"])
        recovered.close()
        # torn bytes were not removed from disk, but every parse ignores them
        assert AppendLog(path).records()[-1] == ["b"]


class TestTranscripts:
    def _turn(self, session, speaker, t0, t1, text="words", tags=frozenset()):
        return TranscriptTurn(session, speaker, text, t0, t1, tags)

    def test_first_turn_and_reload(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.append_turn(self._turn("s1", "alice", 0.0, 2.0))
        store.close()
        again = TranscriptStore(tmp_path)
        turns = again.query_turns()
        assert len(turns) == 1 and turns[0].speaker == "alice"

    def test_out_of_order_rejected(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.append_turn(self._turn("s1", "a", 0.0, 5.0))
        with pytest.raises(OutOfOrderTurn):
            store.append_turn(self._turn("s1", "b", 4.0, 6.0))

    def test_separate_sessions_independent(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.append_turn(self._turn("s1", "a", 0.0, 5.0))
        store.append_turn(self._turn("s2", "b", 1.0, 2.0))  # fine: other session

    def test_alias_resolution_after_promotion(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.append_turn(self._turn("s1", "anon-1", 0.0, 2.0))
        store.append_turn(self._turn("s1", "alice", 2.0, 4.0))
        store.add_alias("anon-1", "s002")
        by_speaker = store.query_turns(speaker="s002")
        assert len(by_speaker) == 1 and by_speaker[0].t_start == 0.0
        assert store.query_turns(speaker="anon-1") == []

    def test_disjoint_time_range_empty(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.append_turn(self._turn("s1", "a", 0.0, 5.0))
        assert store.query_turns(t_from=10.0, t_to=20.0) == []

    def test_tag_filter(self, tmp_path):
        store = TranscriptStore(tmp_path)
        store.append_turn(self._turn("s1", "a", 0.0, 5.0, tags=frozenset({"medical"})))
        store.append_turn(self._turn("s1", "a", 5.0, 9.0))
        assert len(store.query_turns(tag="medical")) == 1

    def test_query_matches_linear_scan_oracle(self, tmp_path):
        rng = np.random.default_rng(23)
        store = TranscriptStore(tmp_path)
        shadow = []
        t = {s: 0.0 for s in ("s1", "s2", "s3")}
        for i in range(2000):
            session = f"s{int(rng.integers(1, 4))}"
            speaker = f"spk{int(rng.integers(0, 5))}"
            start = t[session] + float(rng.uniform(0, 3))
            end = start + float(rng.uniform(0.5, 4))
            t[session] = end
            turn = TranscriptTurn(session, speaker, f"text {i}", start, end)
            store.append_turn(turn)
            shadow.append(turn)
        want = sorted(
            (t for t in shadow if t.session_id == "s2" and t.speaker == "spk3"),
            key=lambda t: t.t_start,
        )
        got = store.query_turns(session="s2", speaker="spk3")
        assert [(g.t_start, g.text) for g in got] == [(w.t_start, w.text) for w in want]


class TestLifeline:
    def test_single_entry(self, tmp_path):
        store = Store(tmp_path / "d")
        store.lifeline.append("2026-03-10", "childhood", "grew up near the sea", "s1")
        assert len(store.lifeline.timeline()) == 1

    def test_same_date_preserves_insertion_order(self, tmp_path):
        store = Store(tmp_path / "d")
        store.lifeline.append("2026-03-10", "a", "first", "s1")
        store.lifeline.append("2026-03-10", "b", "second", "s1")
        texts = [e.text for e in store.lifeline.timeline()]
        assert texts == ["first", "second"]

    def test_365_entries_match_sort_oracle(self, tmp_path):
        rng = np.random.default_rng(31)
        store = Store(tmp_path / "d")
        entries = []
        for i in range(365):
            day = f"2026-{int(rng.integers(1, 13)):02d}-{int(rng.integers(1, 29)):02d}"
            entry = store.lifeline.append(day, f"t{i}", f"text {i}", "s1")
            entries.append(entry)
        got = [(e.date, e.entry_id) for e in store.lifeline.timeline()]
        assert got == sorted(got)

    def test_append_only_supersede(self, tmp_path):
        store = Store(tmp_path / "d")
        first = store.lifeline.append("2026-03-10", "a", "draft", "s1")
        second = store.lifeline.append("2026-03-11", "a", "corrected", "s1", supersedes=first.entry_id)
        timeline = store.lifeline.timeline()
        assert len(timeline) == 2 and timeline[1].supersedes == first.entry_id


class TestSessionsAndNotes:
    def test_session_meta_round_trip(self, tmp_path):
        store = Store(tmp_path / "d")
        store.sessions.set("visit", "date", "2026-03-10")
        store.sessions.set("visit", "status", "ill")
        store.close()
        again = Store(tmp_path / "d")
        assert again.sessions.get("visit", "status") == "ill"
        assert again.sessions.known("visit")

    def test_owner_notes_round_trip(self, tmp_path):
        store = Store(tmp_path / "d")
        store.owner_notes.append(datetime(2026, 4, 10, 6, 30), "see a doctor")
        store.close()
        again = Store(tmp_path / "d")
        assert [text for _, text in again.owner_notes.all()] == ["see a doctor"]
