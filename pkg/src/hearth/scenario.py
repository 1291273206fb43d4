"""Deterministic scenario replay.

A scenario file is the desk-scale substitute for live audio and sensors:
newline-delimited, `#` comments, every line starting with an ISO timestamp
and a kind tag.  Timestamps must be non-decreasing; the engine's scheduled
work (rollover, watch checks, briefings) fires as the virtual clock passes
each line.  Full format reference lives in docs/formats.md.

    2026-03-10T07:00:00 clock
    2026-03-10T07:00:05 enroll Alice owner
    2026-03-10T10:00:10 utter Alice silent Good morning doctor
    2026-03-10T10:00:40 sensor heart_rate - 61
    2026-03-10T10:01:00 synthseg alice 0.0 2.5 0.2
    2026-03-10T10:01:00 truth alice 0.0 2.5
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from . import timeutil, vectors
from .config import Config
from .diarization import Role, SegmentEmbedding
from .dialogue import Marker
from .engine import Engine
from .errors import HearthError
from .fusion import SensorKind
from .memory import Source


class ParseError(HearthError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnorderedScenario(HearthError):
    pass


KINDS = (
    "clock", "session", "enroll", "utter", "segment", "synthseg", "sensor",
    "agenda", "doc", "truth", "anchor", "status", "weather", "lifeline", "search",
)


@dataclass(frozen=True)
class ScenarioEvent:
    timestamp: datetime
    kind: str
    args: tuple[str, ...]
    line_no: int


def parse_scenario(path: str | Path) -> list[ScenarioEvent]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise HearthError(f"scenario file not found: {path}")
    events: list[ScenarioEvent] = []
    last_ts: datetime | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 2)
        if len(parts) < 2:
            raise ParseError(line_no, "expected '<timestamp> <kind> [args]'")
        try:
            ts = timeutil.parse_timestamp(parts[0])
        except ValueError:
            raise ParseError(line_no, f"bad timestamp {parts[0]!r}")
        kind = parts[1]
        if kind not in KINDS:
            raise ParseError(line_no, f"unknown event kind {kind!r}")
        if last_ts is not None and ts < last_ts:
            raise UnorderedScenario(
                f"line {line_no}: timestamp {parts[0]} precedes an earlier event"
            )
        last_ts = ts
        rest = parts[2] if len(parts) > 2 else ""
        events.append(ScenarioEvent(ts, kind, (rest,) if rest else (), line_no))
    return events


def _split(event: ScenarioEvent, n: int, trailing_text: bool = False) -> list[str]:
    """First n whitespace fields of the args; with trailing_text the n-th
    field keeps all remaining words."""
    raw = event.args[0] if event.args else ""
    if trailing_text:
        parts = raw.split(None, n - 1)
    else:
        parts = raw.split()
    if len(parts) < n or (not trailing_text and len(parts) > n):
        raise ParseError(event.line_no, f"{event.kind} expects {n} argument(s), got {raw!r}")
    return parts


def apply_event(engine: Engine, event: ScenarioEvent) -> None:
    engine.advance_clock(event.timestamp)
    kind = event.kind
    try:
        if kind == "clock":
            return
        if kind == "session":
            (session_id,) = _split(event, 1)
            engine.open_session(session_id)
        elif kind == "enroll":
            role, name = _split(event, 2, trailing_text=True)
            engine.enroll(name, Role(role))
        elif kind == "utter":
            hint, marker, text = _split(event, 3, trailing_text=True)
            engine.handle_utterance(hint, Marker(marker), text)
        elif kind == "segment":
            t0, t1, b64 = _split(event, 3)
            seg = SegmentEmbedding(
                vectors.decode_vector(b64), float(t0), float(t1), engine.session_id
            )
            engine.handle_segment(seg)
        elif kind == "synthseg":
            raw = (event.args[0] if event.args else "").split()
            if len(raw) not in (3, 4):
                raise ParseError(
                    event.line_no, "synthseg expects '<name> <t_start> <t_end> [noise]'"
                )
            noise = float(raw[3]) if len(raw) == 4 else 0.2
            engine.synth_segment(raw[0], float(raw[1]), float(raw[2]), noise)
        elif kind == "sensor":
            raw = (event.args[0] if event.args else "").split()
            if len(raw) not in (3, 4):
                raise ParseError(
                    event.line_no, "sensor expects '<kind> <room|-> <value> [alert]'"
                )
            sensor_kind = SensorKind(raw[0])
            room = None if raw[1] == "-" else raw[1]
            value: float | tuple[float, float, float]
            if "," in raw[2]:
                a, b, c = raw[2].split(",")
                value = (float(a), float(b), float(c))
            else:
                value = float(raw[2])
            alert = len(raw) == 4 and raw[3] == "alert"
            engine.handle_sensor(sensor_kind, room, value, alert=alert)
        elif kind == "agenda":
            date, clock, text = _split(event, 3, trailing_text=True)
            engine.add_agenda(date, clock, text)
        elif kind == "doc":
            source, text = _split(event, 2, trailing_text=True)
            engine.ingest_document(Source(source), text)
        elif kind == "truth":
            name, t0, t1 = _split(event, 3)
            engine.record_truth(name, float(t0), float(t1))
        elif kind == "anchor":
            (name,) = _split(event, 1)
            engine.record_anchor(name)
        elif kind == "status":
            engine.set_status(event.args[0] if event.args else "")
        elif kind == "weather":
            from .gateway import StaticWeatherClient

            engine.weather_client = StaticWeatherClient(event.args[0] if event.args else "")
        elif kind == "lifeline":
            topic, text = _split(event, 2, trailing_text=True)
            engine.add_lifeline(topic, text)
        elif kind == "search":
            engine.web_search(event.args[0] if event.args else "")
    except (ValueError, KeyError) as e:
        raise ParseError(event.line_no, str(e))


def replay(path: str | Path, config: Config, data_dir: str | None = None,
           **engine_kwargs) -> Engine:
    """Feed a scenario through a fresh engine; returns the final engine."""
    events = parse_scenario(path)
    engine = Engine(config, data_dir=data_dir, **engine_kwargs)
    for event in events:
        apply_event(engine, event)
    engine.flush_turns()
    return engine
