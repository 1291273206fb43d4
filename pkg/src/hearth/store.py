"""Local-only persistence: append-only, checksummed, newline-delimited logs.

Every store is a flat UTF-8 file, one record per line, fields tab-separated
with tabs/newlines/backslashes escaped, and a trailing CRC32 in hex.  A torn
final record (partial write at crash) is discarded on load; corruption
anywhere earlier is an error, never silently skipped.  The first line is a
header reserving a flag for at-rest encryption (currently always `enc=none`).

Promotion of an anonymous cluster never rewrites history: an alias record
maps the cluster id to the new speaker id and queries resolve through it.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Sequence

from .errors import HearthError
from . import timeutil

HEADER = "#hearthlog\tv1\tenc=none"


class StoreCorrupt(HearthError):
    pass


class OutOfOrderTurn(HearthError):
    pass


def _escape(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _unescape(s: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            out.append({"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def encode_record(fields: Sequence[str]) -> str:
    payload = "\t".join(_escape(f) for f in fields)
    crc = zlib.crc32(payload.encode("utf-8")) & 0xFFFFFFFF
    return f"{payload}\t{crc:08x}\n"


def decode_record(line: str) -> list[str] | None:
    """Fields of a record line, or None when the checksum does not verify."""
    line = line.rstrip("\n")
    if "\t" not in line:
        return None
    payload, crc_hex = line.rsplit("\t", 1)
    try:
        crc = int(crc_hex, 16)
    except ValueError:
        return None
    if len(crc_hex) != 8 or crc != zlib.crc32(payload.encode("utf-8")) & 0xFFFFFFFF:
        return None
    return [_unescape(f) for f in payload.split("\t")]


class AppendLog:
    """A single append-only record file with in-memory replay."""

    def __init__(self, path: Path):
        self.path = path
        self._records: list[list[str]] = []
        self._fh = None
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(HEADER + "\n", encoding="utf-8")
            return
        raw = self.path.read_bytes()
        chunks = raw.split(b"\n")
        complete, tail = chunks[:-1], chunks[-1]  # tail nonempty = no final newline
        valid_bytes = 0
        for i, chunk in enumerate(complete):
            is_last = i == len(complete) - 1 and not tail
            try:
                line = chunk.decode("utf-8")
            except UnicodeDecodeError:
                line = None
            if line is not None and line.startswith("#"):
                valid_bytes += len(chunk) + 1
                continue
            rec = decode_record(line) if line is not None else None
            if rec is None:
                if is_last:
                    break  # torn final record from a crash: discard
                raise StoreCorrupt(f"{self.path}: corrupt record at line {i + 1}")
            self._records.append(rec)
            valid_bytes += len(chunk) + 1
        if valid_bytes < len(raw):
            # drop the torn tail so future appends start on a clean boundary
            with open(self.path, "r+b") as fh:
                fh.truncate(valid_bytes)

    def append(self, fields: Sequence[str]) -> int:
        """Append one record; returns its zero-based sequence number."""
        if self._fh is None:
            self._fh = open(self.path, "a", encoding="utf-8", newline="")
        self._fh.write(encode_record(fields))
        self._fh.flush()
        self._records.append(list(fields))
        return len(self._records) - 1

    def records(self) -> list[list[str]]:
        return list(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


@dataclass(frozen=True)
class TranscriptTurn:
    session_id: str
    speaker: str
    text: str
    t_start: float
    t_end: float
    tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.t_end <= self.t_start:
            raise ValueError("turn must have t_end > t_start")


@dataclass(frozen=True)
class LifelineEntry:
    entry_id: int
    date: str
    topic: str
    text: str
    source_session: str
    supersedes: int | None = None


class TranscriptStore:
    """Speaker-attributed turns plus the cluster→speaker alias table."""

    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "transcripts.log")
        self._aliases = AppendLog(directory / "aliases.log")
        self._turns: list[TranscriptTurn] = [self._parse(r) for r in self._log.records()]
        self._alias_map: dict[str, str] = {r[0]: r[1] for r in self._aliases.records()}
        self._last_end: dict[str, float] = {}
        for t in self._turns:
            self._last_end[t.session_id] = max(self._last_end.get(t.session_id, 0.0), t.t_end)

    @staticmethod
    def _parse(rec: list[str]) -> TranscriptTurn:
        session, speaker, t_start, t_end, tags, text = rec
        return TranscriptTurn(
            session_id=session,
            speaker=speaker,
            text=text,
            t_start=float(t_start),
            t_end=float(t_end),
            tags=frozenset(tags.split(",")) if tags else frozenset(),
        )

    def append_turn(self, turn: TranscriptTurn) -> int:
        last = self._last_end.get(turn.session_id)
        if last is not None and turn.t_start < last:
            raise OutOfOrderTurn(
                f"turn at {turn.t_start} starts before end of previous turn ({last}) "
                f"in session {turn.session_id}"
            )
        seq = self._log.append(
            [
                turn.session_id,
                turn.speaker,
                repr(turn.t_start),
                repr(turn.t_end),
                ",".join(sorted(turn.tags)),
                turn.text,
            ]
        )
        self._turns.append(turn)
        self._last_end[turn.session_id] = turn.t_end
        return seq

    def last_end(self, session: str) -> float | None:
        return self._last_end.get(session)

    def add_alias(self, cluster_id: str, speaker_id: str) -> None:
        self._aliases.append([cluster_id, speaker_id])
        self._alias_map[cluster_id] = speaker_id

    def resolve(self, speaker: str) -> str:
        seen = set()
        while speaker in self._alias_map and speaker not in seen:
            seen.add(speaker)
            speaker = self._alias_map[speaker]
        return speaker

    def query_turns(
        self,
        session: str | None = None,
        speaker: str | None = None,
        t_from: float | None = None,
        t_to: float | None = None,
        tag: str | None = None,
    ) -> list[TranscriptTurn]:
        """All matching turns with aliases resolved, time-ordered."""
        out = []
        for idx, turn in enumerate(self._turns):
            resolved = self.resolve(turn.speaker)
            if session is not None and turn.session_id != session:
                continue
            if speaker is not None and resolved != speaker:
                continue
            if t_from is not None and turn.t_end <= t_from:
                continue
            if t_to is not None and turn.t_start >= t_to:
                continue
            if tag is not None and tag not in turn.tags:
                continue
            out.append((turn.t_start, idx, turn, resolved))
        out.sort(key=lambda item: (item[0], item[1]))
        return [
            TranscriptTurn(t.session_id, resolved, t.text, t.t_start, t.t_end, t.tags)
            for (_, _, t, resolved) in out
        ]

    def sessions(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self._turns:
            seen.setdefault(t.session_id, None)
        return list(seen)

    def close(self) -> None:
        self._log.close()
        self._aliases.close()


class LifelineStore:
    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "lifeline.log")
        self._entries: list[LifelineEntry] = [
            LifelineEntry(int(r[0]), r[1], r[2], r[4], r[3], int(r[5]) if r[5] else None)
            for r in self._log.records()
        ]

    def append(self, date: str, topic: str, text: str, source_session: str,
               supersedes: int | None = None) -> LifelineEntry:
        entry = LifelineEntry(len(self._entries) + 1, date, topic, text, source_session, supersedes)
        self._log.append(
            [str(entry.entry_id), date, topic, source_session, text,
             "" if supersedes is None else str(supersedes)]
        )
        self._entries.append(entry)
        return entry

    def timeline(self) -> list[LifelineEntry]:
        """Date-ordered; ties on date keep insertion order."""
        return sorted(self._entries, key=lambda e: (e.date, e.entry_id))

    def close(self) -> None:
        self._log.close()


class SessionMetaStore:
    """Per-session metadata: date of the session and the health status pair."""

    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "sessions.log")
        self._meta: dict[str, dict[str, str]] = {}
        for session, key, value in self._log.records():
            self._meta.setdefault(session, {})[key] = value

    def set(self, session: str, key: str, value: str) -> None:
        self._log.append([session, key, value])
        self._meta.setdefault(session, {})[key] = value

    def get(self, session: str, key: str, default: str | None = None) -> str | None:
        return self._meta.get(session, {}).get(key, default)

    def known(self, session: str) -> bool:
        return session in self._meta

    def close(self) -> None:
        self._log.close()


class OwnerNoteStore:
    """Owner-addressed private notes (e.g. health recommendations)."""

    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "owner_notes.log")
        self._notes: list[tuple[str, str]] = [(r[0], r[1]) for r in self._log.records()]

    def append(self, timestamp: datetime, text: str) -> None:
        self._log.append([timeutil.fmt_timestamp(timestamp), text])
        self._notes.append((timeutil.fmt_timestamp(timestamp), text))

    def all(self) -> list[tuple[str, str]]:
        return list(self._notes)

    def close(self) -> None:
        self._log.close()


class AgendaStore:
    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "agenda.log")
        self._entries: list[tuple[str, str, str]] = [tuple(r) for r in self._log.records()]

    def add(self, date: str, clock: str, text: str) -> None:
        self._log.append([date, clock, text])
        self._entries.append((date, clock, text))

    def for_date(self, date: str) -> list[tuple[str, str]]:
        """Time-sorted (clock, text) pairs for one day."""
        hits = [(c, t) for (d, c, t) in self._entries if d == date]
        hits.sort(key=lambda pair: pair[0])
        return hits

    def close(self) -> None:
        self._log.close()


class SensorLog:
    """Raw sensor reading history (kind, room, value fields as text)."""

    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "sensors.log")

    def append(self, sensor_id: str, kind: str, room: str, value: str, timestamp: datetime) -> None:
        self._log.append([sensor_id, kind, room, value, timeutil.fmt_timestamp(timestamp)])

    def records(self) -> list[list[str]]:
        return self._log.records()

    def close(self) -> None:
        self._log.close()


class AnchorLog:
    """Named day events recall queries can anchor to (wake, bedtime, ...)."""

    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "anchors.log")
        self._anchors: list[tuple[str, datetime]] = [
            (r[0], timeutil.parse_timestamp(r[1])) for r in self._log.records()
        ]

    def append(self, name: str, timestamp: datetime) -> None:
        self._log.append([name, timeutil.fmt_timestamp(timestamp)])
        self._anchors.append((name, timestamp))

    def all(self) -> list[tuple[str, datetime]]:
        return list(self._anchors)

    def close(self) -> None:
        self._log.close()


class ActionLog:
    """Ordered record of everything the engine decided to do or say."""

    def __init__(self, directory: Path):
        self._log = AppendLog(directory / "actions.log")

    @property
    def path(self) -> Path:
        return self._log.path

    def append(self, timestamp: datetime, kind: str, addressee: str, text: str) -> int:
        return self._log.append([timeutil.fmt_timestamp(timestamp), kind, addressee, text])

    def records(self) -> list[list[str]]:
        return self._log.records()

    def __len__(self) -> int:
        return len(self._log)

    def close(self) -> None:
        self._log.close()


class Store:
    """Facade over all persistent state under one data directory.

    Opens no sockets and spawns nothing: locality is enforced structurally
    (the gateway owns the only external clients) and asserted in tests via
    the gateway's invocation counter.
    """

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.transcripts = TranscriptStore(self.root)
        self.lifeline = LifelineStore(self.root)
        self.sessions = SessionMetaStore(self.root)
        self.owner_notes = OwnerNoteStore(self.root)
        self.agenda = AgendaStore(self.root)
        self.sensors = SensorLog(self.root)
        self.anchors = AnchorLog(self.root)
        self.actions = ActionLog(self.root)

    def close(self) -> None:
        self.transcripts.close()
        self.lifeline.close()
        self.sessions.close()
        self.owner_notes.close()
        self.agenda.close()
        self.sensors.close()
        self.anchors.close()
        self.actions.close()
