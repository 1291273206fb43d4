"""Scheduled and pattern-triggered actions.

Watch rules scan the recent event history night by night: a rule fires when
enough of the last W nights each contain enough matching events, with a
per-rule cooldown so a persistent condition nags rather than storms.
Evaluation is pure; the caller records trigger times.

The scheduler drives recurring work (morning briefing, watch checks, memory
rollover, sporadic cloud sync) off the virtual clock.  Catch-up after
downtime fires at most one missed occurrence per entry per tick.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from pathlib import Path
from typing import Callable, Mapping, Sequence

from . import timeutil
from .errors import HearthError


class UnsortedHistory(HearthError):
    pass


class RuleConfigError(HearthError):
    pass


@dataclass(frozen=True)
class HistoryEvent:
    """Normalized record watch rules match against (sensor or activity)."""

    kind: str  # e.g. "sensor" or "activity"
    label: str  # e.g. "motion", "toileting"
    room: str | None
    timestamp: datetime


@dataclass(frozen=True)
class EventPredicate:
    kind: str | None = None
    label: str | None = None
    room: str | None = None
    tod_start: time | None = None
    tod_end: time | None = None

    def matches(self, ev: HistoryEvent) -> bool:
        if self.kind is not None and ev.kind != self.kind:
            return False
        if self.label is not None and ev.label != self.label:
            return False
        if self.room is not None and ev.room != self.room:
            return False
        if self.tod_start is not None and self.tod_end is not None:
            if not timeutil.in_tod_range(ev.timestamp.time(), self.tod_start, self.tod_end):
                return False
        return True


@dataclass(frozen=True)
class WatchRule:
    rule_id: str
    predicate: EventPredicate
    n_min: int  # matching events per night for the night to qualify
    window_nights: int  # W: how many recent nights are examined
    m_min: int  # qualifying nights needed to trigger
    cooldown_days: int
    action: str  # recommend_doctor | alert | custom
    text: str = ""

    def __post_init__(self) -> None:
        if self.n_min < 1:
            raise RuleConfigError("n_min must be >= 1")
        if not 1 <= self.m_min <= self.window_nights:
            raise RuleConfigError("need 1 <= m_min <= window_nights")
        if self.cooldown_days < 0:
            raise RuleConfigError("cooldown must be >= 0")
        if self.action not in ("recommend_doctor", "alert", "custom"):
            raise RuleConfigError(f"unknown action template {self.action!r}")


RECOMMEND_DOCTOR_TEXT = "I have noticed repeated nightly activity; please consider consulting a medical doctor."


def action_text(rule: WatchRule) -> str:
    if rule.action == "recommend_doctor":
        return RECOMMEND_DOCTOR_TEXT
    if rule.action == "alert":
        return rule.text or f"watch rule {rule.rule_id} triggered"
    return rule.text


@dataclass(frozen=True)
class TriggeredAction:
    rule_id: str
    action: str
    text: str
    owner_only: bool
    triggered_at: datetime


def night_of(ts: datetime, night_start: time, night_end: time) -> date | None:
    """Which night (keyed by its starting date) an event belongs to, or None
    if it falls outside the night window.  Windows may cross midnight."""
    t = ts.time()
    if not timeutil.in_tod_range(t, night_start, night_end):
        return None
    if night_start > night_end and t < night_end:
        return (ts - timedelta(days=1)).date()
    return ts.date()


def _completed_nights(now: datetime, w: int, night_start: time, night_end: time) -> list[date]:
    """Start dates of the W most recent fully elapsed nights at `now`."""
    candidate = now.date()
    nights: list[date] = []
    while len(nights) < w:
        end = datetime.combine(
            candidate + (timedelta(days=1) if night_start > night_end else timedelta()),
            night_end,
        )
        if end <= now:
            nights.append(candidate)
        candidate -= timedelta(days=1)
        if candidate < now.date() - timedelta(days=w + 3):
            break
    return sorted(nights)


def evaluate_watch_rules(
    rules: Sequence[WatchRule],
    history: Sequence[HistoryEvent],
    now: datetime,
    last_triggers: Mapping[str, datetime] | None = None,
    night_start: time = time(23, 0),
    night_end: time = time(6, 0),
) -> list[TriggeredAction]:
    """Pure evaluation: which rules fire at `now` given the history and the
    caller-tracked last trigger times."""
    for a, b in zip(history, history[1:]):
        if b.timestamp < a.timestamp:
            raise UnsortedHistory("event history must be time-ordered")
    last_triggers = last_triggers or {}
    triggered: list[TriggeredAction] = []
    for rule in rules:
        last = last_triggers.get(rule.rule_id)
        if last is not None and (now.date() - last.date()).days < rule.cooldown_days:
            continue
        nights = _completed_nights(now, rule.window_nights, night_start, night_end)
        per_night: dict[date, int] = {n: 0 for n in nights}
        for ev in history:
            if not rule.predicate.matches(ev):
                continue
            night = night_of(ev.timestamp, night_start, night_end)
            if night in per_night:
                per_night[night] += 1
        qualifying = sum(1 for count in per_night.values() if count >= rule.n_min)
        if qualifying >= rule.m_min:
            triggered.append(
                TriggeredAction(
                    rule_id=rule.rule_id,
                    action=rule.action,
                    text=action_text(rule),
                    owner_only=rule.action == "recommend_doctor",
                    triggered_at=now,
                )
            )
    return triggered


def load_watch_rules(path: str | Path) -> list[WatchRule]:
    """Declarative rule file: a JSON list of rule objects (see docs/formats.md)."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise RuleConfigError(f"rules file not found: {path}")
    except json.JSONDecodeError as e:
        raise RuleConfigError(f"rules file {path} is not valid JSON: {e}")
    if not isinstance(raw, list):
        raise RuleConfigError("rules file must contain a JSON list")
    rules = []
    for i, entry in enumerate(raw):
        try:
            pred = entry.get("predicate", {})
            rules.append(
                WatchRule(
                    rule_id=entry["rule_id"],
                    predicate=EventPredicate(
                        kind=pred.get("kind"),
                        label=pred.get("label"),
                        room=pred.get("room"),
                        tod_start=time.fromisoformat(pred["tod_start"]) if "tod_start" in pred else None,
                        tod_end=time.fromisoformat(pred["tod_end"]) if "tod_end" in pred else None,
                    ),
                    n_min=int(entry["n_min"]),
                    window_nights=int(entry["window_nights"]),
                    m_min=int(entry["m_min"]),
                    cooldown_days=int(entry.get("cooldown_days", 0)),
                    action=entry.get("action", "alert"),
                    text=entry.get("text", ""),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise RuleConfigError(f"rule #{i + 1} is malformed: {e}")
    return rules


def default_nightly_rule(night_start: time = time(23, 0), night_end: time = time(6, 0)) -> WatchRule:
    """Repeated nightly bathroom activity -> owner-only doctor recommendation."""
    return WatchRule(
        rule_id="nightly-bathroom",
        predicate=EventPredicate(
            label="toileting", tod_start=night_start, tod_end=night_end
        ),
        n_min=3,
        window_nights=7,
        m_min=5,
        cooldown_days=3,
        action="recommend_doctor",
    )


@dataclass(frozen=True)
class Briefing:
    date: str
    weather: str
    appointments: tuple[tuple[str, str], ...]  # (clock, text), time-sorted
    vitals: str | None = None

    def spoken_text(self) -> str:
        parts = [f"Good morning. Weather: {self.weather}."]
        if self.appointments:
            listed = "; ".join(f"{clock} {text}" for clock, text in self.appointments)
            parts.append(f"Today: {listed}.")
        else:
            parts.append("No appointments today.")
        if self.vitals:
            parts.append(self.vitals)
        return " ".join(parts)


def morning_briefing(
    day: date,
    agenda,
    weather_fn: Callable[[str], str | None],
    morning_heart_rate: tuple[float, datetime] | None = None,
) -> Briefing:
    """Assemble a briefing; degrades gracefully when offline (no weather)."""
    iso = day.isoformat()
    weather = weather_fn(iso) or "weather unavailable"
    appointments = tuple(agenda.for_date(iso))
    vitals = None
    if morning_heart_rate is not None:
        value, ts = morning_heart_rate
        vitals = f"First heart rate this morning: {value:.0f} bpm at {ts.strftime('%H:%M')}."
    return Briefing(date=iso, weather=weather, appointments=appointments, vitals=vitals)


@dataclass
class ScheduleEntry:
    action_id: str
    next_due: datetime
    advance: Callable[[datetime], datetime]  # next occurrence strictly after `now`


def daily_at(t: time) -> Callable[[datetime], datetime]:
    def _advance(now: datetime) -> datetime:
        candidate = datetime.combine(now.date(), t)
        while candidate <= now:
            candidate += timedelta(days=1)
        return candidate

    return _advance


def every(interval: timedelta) -> Callable[[datetime], datetime]:
    def _advance(now: datetime) -> datetime:
        return now + interval

    return _advance


class Schedule:
    def __init__(self) -> None:
        self.entries: list[ScheduleEntry] = []

    def add_daily(self, action_id: str, t: time, start: datetime) -> None:
        adv = daily_at(t)
        first = datetime.combine(start.date(), t)
        if first < start:
            first = adv(start)
        self.entries.append(ScheduleEntry(action_id, first, adv))

    def add_interval(self, action_id: str, interval: timedelta, start: datetime) -> None:
        self.entries.append(ScheduleEntry(action_id, start + interval, every(interval)))


def schedule_tick(now: datetime, schedule: Schedule) -> list[str]:
    """Action ids due at `now`.  Each entry fires at most once per tick no
    matter how many occurrences were missed, and its next-due time advances
    strictly past `now` (the catch-up policy)."""
    due = []
    for entry in schedule.entries:
        if entry.next_due <= now:
            due.append(entry.action_id)
            entry.next_due = entry.advance(now)
    return due
