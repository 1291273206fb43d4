"""Timestamp helpers for the virtual clock.

Scenario timestamps are naive ISO-8601 local datetimes.  Epoch conversion
treats naive datetimes as UTC so serialized seconds never depend on the host
timezone, keeping replay output byte-identical across machines.
"""

from __future__ import annotations

from datetime import date, datetime, time, timedelta

_EPOCH = datetime(1970, 1, 1)


def parse_timestamp(s: str) -> datetime:
    return datetime.fromisoformat(s)


def fmt_timestamp(dt: datetime) -> str:
    return dt.isoformat(sep="T", timespec="seconds")


def to_epoch(dt: datetime) -> float:
    return (dt - _EPOCH).total_seconds()


def from_epoch(seconds: float) -> datetime:
    return _EPOCH + timedelta(seconds=seconds)


def parse_clock(s: str) -> time:
    """'HH:MM' or 'HH:MM:SS' wall-clock time."""
    return time.fromisoformat(s)


def at_time(day: date, t: time) -> datetime:
    return datetime.combine(day, t)


def time_of_day_bucket(dt: datetime) -> str:
    """morning [05,12) / afternoon [12,17) / evening [17,22) / night otherwise."""
    h = dt.hour
    if 5 <= h < 12:
        return "morning"
    if 12 <= h < 17:
        return "afternoon"
    if 17 <= h < 22:
        return "evening"
    return "night"


def in_tod_range(t: time, start: time, end: time) -> bool:
    """Time-of-day containment; ranges may cross midnight (start > end)."""
    if start <= end:
        return start <= t < end
    return t >= start or t < end
