"""Edge-side sensor fusion.

Room occupancy comes from a last-motion-wins sweep: the user is wherever the
most recent motion sensor fired, until a motion in a different room.  On top
of that sit the activity rules (cooking, eating, resting, toileting), the
sedentarization ratio, pose classification from pre-extracted IMU features,
and preferred-context inference.

Cloud-computed activity labels can be pulled sporadically through the
gateway; merging is idempotent and edge labels are never overwritten.
"""

from __future__ import annotations

import math
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Iterable, Protocol, Sequence

from . import timeutil
from .errors import HearthError
from .gateway import ClientFailure


class EmptyWindow(HearthError):
    pass


class UnsortedInput(HearthError):
    pass


class InvalidFeature(HearthError):
    pass


class MalformedPayload(HearthError):
    pass


class SensorKind(str, Enum):
    MOTION = "motion"
    DOOR = "door"
    TEMPERATURE = "temperature"
    HEART_RATE = "heart_rate"
    IMU = "imu"


@dataclass(frozen=True)
class SensorReading:
    sensor_id: str
    kind: SensorKind
    room: str | None
    value: float | tuple[float, float, float]
    timestamp: datetime

    def __post_init__(self) -> None:
        if self.kind in (SensorKind.MOTION, SensorKind.DOOR) and not self.room:
            raise ValueError(f"{self.kind.value} readings must carry a room")
        if self.kind is SensorKind.HEART_RATE and not (isinstance(self.value, (int, float)) and self.value > 0):
            raise ValueError("heart_rate must be a positive number")
        if self.kind is SensorKind.IMU and (
            not isinstance(self.value, tuple) or len(self.value) != 3
        ):
            raise ValueError("imu value must be (accel_variance, tilt_deg, step_rate_hz)")


class Activity(str, Enum):
    COOKING = "cooking"
    EATING = "eating"
    RESTING = "resting"
    TOILETING = "toileting"
    OTHER = "other"


class LabelOrigin(str, Enum):
    EDGE = "edge"
    CLOUD = "cloud"


@dataclass(frozen=True)
class ActivityLabel:
    label: Activity
    t_start: datetime
    t_end: datetime
    origin: LabelOrigin

    def __post_init__(self) -> None:
        if self.t_end <= self.t_start:
            raise ValueError("label must have t_end > t_start")


class Pose(str, Enum):
    STANDING = "standing"
    SITTING = "sitting"
    LYING = "lying"
    WALKING = "walking"


@dataclass(frozen=True)
class PoseLabel:
    pose: Pose
    t_start: datetime
    t_end: datetime

    def __post_init__(self) -> None:
        if self.t_end <= self.t_start:
            raise ValueError("label must have t_end > t_start")


@dataclass(frozen=True)
class ContextSnapshot:
    location: str
    pose: Pose
    time_of_day: str  # morning / afternoon / evening / night

    def __post_init__(self) -> None:
        if not self.location or self.time_of_day not in ("morning", "afternoon", "evening", "night"):
            raise ValueError("context snapshot requires location, pose and time of day")


def _motion_intervals(
    readings: Sequence[SensorReading],
) -> list[tuple[str, datetime, datetime | None]]:
    """(room, start, end) spans under last-motion-wins; final end is open."""
    motions = [r for r in readings if r.kind is SensorKind.MOTION]
    spans: list[tuple[str, datetime, datetime | None]] = []
    for r in motions:
        if spans and spans[-1][0] == r.room:
            continue  # same room: the open span just continues
        if spans:
            room, start, _ = spans[-1]
            spans[-1] = (room, start, r.timestamp)
        spans.append((r.room, r.timestamp, None))
    return spans


def room_occupancy_stats(
    readings: Sequence[SensorReading], window: tuple[datetime, datetime]
) -> dict[str, float]:
    """Seconds per room inside [t0, t1); no readings means unknown, not zero."""
    t0, t1 = window
    if t1 <= t0:
        raise EmptyWindow("occupancy window must have t1 > t0")
    _check_sorted(readings)
    stats: dict[str, float] = {}
    for room, start, end in _motion_intervals(readings):
        lo = max(start, t0)
        hi = min(end if end is not None else t1, t1)
        if hi > lo:
            stats[room] = stats.get(room, 0.0) + (hi - lo).total_seconds()
    return stats


def sedentarization_level(stats: dict[str, float], window_seconds: float) -> float:
    """Share of attributed time spent in the single most-occupied room."""
    total = sum(stats.values())
    if total <= 0.0:
        return 0.0
    return max(stats.values()) / total


def _check_sorted(readings: Sequence[SensorReading]) -> None:
    last: dict[str, datetime] = {}
    prev: datetime | None = None
    for r in readings:
        if prev is not None and r.timestamp < prev:
            raise UnsortedInput("sensor readings must be time-ordered")
        if r.sensor_id in last and r.timestamp < last[r.sensor_id]:
            raise UnsortedInput(f"sensor {r.sensor_id} timestamps must be monotone")
        last[r.sensor_id] = r.timestamp
        prev = r.timestamp


@dataclass(frozen=True)
class HarThresholds:
    cooking_door_window_s: float = 600.0
    eating_min_s: float = 900.0
    resting_min_s: float = 1800.0
    gap_other_min_s: float = 300.0


def har_label(
    readings: Sequence[SensorReading],
    window: tuple[datetime, datetime],
    thresholds: HarThresholds = HarThresholds(),
) -> list[ActivityLabel]:
    """Rule-based activity labels over one window, edge origin.

    cooking   kitchen occupancy with a kitchen door event within 10 min of a
              kitchen motion in that span
    eating    dining-room occupancy of 15+ min immediately after cooking
    resting   bedroom occupancy of 30+ min
    toileting any bathroom occupancy
    other     everything else, and leading gaps of 5+ min
    """
    t0, t1 = window
    if t1 <= t0:
        raise EmptyWindow("labeling window must have t1 > t0")
    _check_sorted(readings)

    doors = [r for r in readings if r.kind is SensorKind.DOOR]
    motions = [r for r in readings if r.kind is SensorKind.MOTION]

    spans = []
    for room, start, end in _motion_intervals(readings):
        lo = max(start, t0)
        hi = min(end if end is not None else t1, t1)
        if hi > lo:
            spans.append((room, lo, hi))

    raw: list[tuple[Activity, datetime, datetime]] = []
    if spans and spans[0][1] > t0 and (spans[0][1] - t0).total_seconds() >= thresholds.gap_other_min_s:
        raw.append((Activity.OTHER, t0, spans[0][1]))

    prev_label: Activity | None = None
    for room, lo, hi in spans:
        seconds = (hi - lo).total_seconds()
        label = Activity.OTHER
        if room == "bathroom":
            label = Activity.TOILETING
        elif room == "kitchen":
            span_motions = [
                m for m in motions if m.room == "kitchen" and lo <= m.timestamp < hi
            ]
            span_doors = [d for d in doors if d.room == "kitchen"]
            paired = any(
                abs((d.timestamp - m.timestamp).total_seconds()) <= thresholds.cooking_door_window_s
                for d in span_doors
                for m in span_motions
            )
            if paired:
                label = Activity.COOKING
        elif room == "dining_room":
            if prev_label is Activity.COOKING and seconds >= thresholds.eating_min_s:
                label = Activity.EATING
        elif room == "bedroom":
            if seconds >= thresholds.resting_min_s:
                label = Activity.RESTING
        raw.append((label, lo, hi))
        prev_label = label

    merged: list[ActivityLabel] = []
    for label, lo, hi in raw:
        if merged and merged[-1].label is label and merged[-1].t_end == lo:
            merged[-1] = ActivityLabel(label, merged[-1].t_start, hi, LabelOrigin.EDGE)
        else:
            merged.append(ActivityLabel(label, lo, hi, LabelOrigin.EDGE))
    return merged


@dataclass(frozen=True)
class PoseThresholds:
    walk_step_hz: float = 0.5
    lie_tilt_deg: float = 60.0
    sit_accel_var: float = 0.05


def pose_classify(
    feature: tuple[float, float, float], thresholds: PoseThresholds = PoseThresholds()
) -> Pose:
    """Pose from (accel variance, tilt degrees, step rate Hz).

    Precedence: walking > lying > standing > sitting.
    """
    accel_var, tilt_deg, step_hz = feature
    if not all(math.isfinite(v) for v in feature):
        raise InvalidFeature("imu feature values must be finite")
    if accel_var < 0 or step_hz < 0:
        raise InvalidFeature("accel variance and step rate must be non-negative")
    if step_hz >= thresholds.walk_step_hz:
        return Pose.WALKING
    if tilt_deg >= thresholds.lie_tilt_deg:
        return Pose.LYING
    if accel_var >= thresholds.sit_accel_var:
        return Pose.STANDING
    return Pose.SITTING


def preferred_context(
    log: Sequence[tuple[datetime, ContextSnapshot]],
) -> ContextSnapshot | None:
    """Componentwise mode over chat-time snapshots; ties go to the most
    recent occurrence of the tied value; None for an empty log."""
    if not log:
        return None

    def mode(values: list[tuple[datetime, object]]):
        counts: dict[object, int] = {}
        latest: dict[object, datetime] = {}
        for ts, v in values:
            counts[v] = counts.get(v, 0) + 1
            if v not in latest or ts > latest[v]:
                latest[v] = ts
        return max(counts, key=lambda v: (counts[v], latest[v]))

    location = mode([(ts, s.location) for ts, s in log])
    pose = mode([(ts, s.pose) for ts, s in log])
    tod = mode([(ts, s.time_of_day) for ts, s in log])
    return ContextSnapshot(location, pose, tod)


class LabelStore:
    """Edge and cloud activity labels with per-origin non-overlap."""

    def __init__(self) -> None:
        self._labels: list[ActivityLabel] = []

    def labels(self, origin: LabelOrigin | None = None) -> list[ActivityLabel]:
        out = [l for l in self._labels if origin is None or l.origin is origin]
        return sorted(out, key=lambda l: (l.t_start, l.origin.value))

    def add_edge(self, labels: Iterable[ActivityLabel]) -> None:
        for label in labels:
            if label.origin is not LabelOrigin.EDGE:
                raise ValueError("add_edge only accepts edge labels")
            if not self._overlaps(label):
                self._labels.append(label)

    def merge_cloud(self, labels: Sequence[ActivityLabel]) -> int:
        """Idempotent merge of a cloud batch; edge labels are untouched.

        Duplicate identity is (label, t_start, t_end, origin).  A cloud label
        overlapping an existing cloud label is skipped to keep the per-origin
        non-overlap invariant (first arrival wins).
        """
        existing = {
            (l.label, l.t_start, l.t_end, l.origin) for l in self._labels
        }
        merged = 0
        for label in labels:
            if label.origin is not LabelOrigin.CLOUD:
                raise MalformedPayload("cloud batch contained a non-cloud label")
            key = (label.label, label.t_start, label.t_end, label.origin)
            if key in existing or self._overlaps(label):
                continue
            self._labels.append(label)
            existing.add(key)
            merged += 1
        return merged

    def _overlaps(self, label: ActivityLabel) -> bool:
        return any(
            l.origin is label.origin
            and l.t_start < label.t_end
            and label.t_start < l.t_end
            for l in self._labels
        )


class CloudLabelClient(Protocol):
    def fetch_since(self, since: datetime) -> list[ActivityLabel]: ...


def parse_label_lines(body: str) -> list[ActivityLabel]:
    """Wire format: one label per line, `label<TAB>t_start<TAB>t_end` ISO times."""
    labels = []
    for ln, line in enumerate(body.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MalformedPayload(f"label line {ln}: expected 3 fields, got {len(parts)}")
        name, start, end = parts
        try:
            labels.append(
                ActivityLabel(
                    Activity(name),
                    timeutil.parse_timestamp(start),
                    timeutil.parse_timestamp(end),
                    LabelOrigin.CLOUD,
                )
            )
        except (ValueError, KeyError) as e:
            raise MalformedPayload(f"label line {ln}: {e}")
    return labels


class HttpLabelClient:
    """Pulls labels from the fusion platform's HTTP endpoint (tests run a
    loopback server; production would authenticate the same call)."""

    def __init__(self, base_url: str, timeout: float = 5.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def fetch_since(self, since: datetime) -> list[ActivityLabel]:
        url = f"{self.base_url}/labels?since={timeutil.fmt_timestamp(since)}"
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                body = resp.read().decode("utf-8")
        except (urllib.error.URLError, OSError) as e:
            raise ClientFailure(str(e))
        return parse_label_lines(body)


def sync_cloud_labels(client, since: datetime, store: LabelStore, gate, now: datetime) -> int:
    """Sporadic pull of cloud labels newer than `since` through the egress
    gate.  Offline (or no client) merges nothing and is still a success; a
    malformed batch is rejected whole, leaving the store unchanged."""
    try:
        labels = gate.fetch_labels(client, since, now)
    except ClientFailure:
        return 0
    if labels is None:
        return 0
    fresh = [l for l in labels if l.t_start > since]
    return store.merge_cloud(fresh)
