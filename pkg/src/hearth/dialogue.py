"""Marker-based event routing and dialogue management.

Every message in the engine is an Event carrying a marker that decides its
fate: sensor events stay silent unless flagged as alerts, utterances from
unregistered speakers trigger exactly one name request per cluster per
session, and questions run the two-generator pipeline (a small one restates
the question and is spoken immediately while the larger one assembles the
answer from retrieved workspace items, masking latency).

Summaries are role-adapted: full detail for the owner and medical roles, a
fixed-vocabulary status line for the housekeeper, permission denied for
guests.  Generators are deterministic template stubs; real language models
are a pluggable concern, not part of this engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from typing import Callable, Protocol, Sequence

from . import memory as memory_mod
from .diarization import Role, SpeakerRegistry
from .errors import HearthError
from .fusion import SensorKind
from .memory import VectorBase, retrieve


class UnknownMarker(HearthError):
    pass


class EmptyQuestion(HearthError):
    pass


class PermissionDenied(HearthError):
    pass


class UnknownSession(HearthError):
    pass


class NoSuchMetric(HearthError):
    pass


class AnchorNotFound(HearthError):
    pass


class NoReadingInWindow(HearthError):
    pass


class EventKind(str, Enum):
    UTTERANCE = "utterance"
    SENSOR = "sensor"
    WEB_RESULT = "web_result"
    SYSTEM = "system"


class Marker(str, Enum):
    RESPOND = "respond"
    SILENT = "silent"
    ALERT = "alert"
    ASK_NAME = "ask_name"
    SUMMARY_REQUEST = "summary_request"
    RECALL_REQUEST = "recall_request"


@dataclass(frozen=True)
class Event:
    event_id: str
    kind: EventKind
    marker: Marker
    payload: str
    timestamp: datetime
    speaker: str | None = None
    session_id: str = "default"

    def __post_init__(self) -> None:
        if self.kind is EventKind.UTTERANCE and not self.speaker:
            raise ValueError("utterance events must carry a speaker")
        if self.kind is EventKind.SENSOR and self.marker not in (Marker.SILENT, Marker.ALERT):
            raise ValueError("sensor events carry marker silent or alert only")


class ActionKind(str, Enum):
    SPEAK = "speak"
    STAY_SILENT = "stay_silent"
    ASK_QUESTION = "ask_question"
    STORE_ONLY = "store_only"
    RUN_RECALL = "run_recall"
    RUN_SUMMARY = "run_summary"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    text: str = ""
    addressee: str | None = None
    supporting_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind in (ActionKind.SPEAK, ActionKind.ASK_QUESTION) and not self.text:
            raise ValueError(f"{self.kind.value} actions carry non-empty text")


class DetailLevel(str, Enum):
    FULL_MEDICAL = "full_medical"
    HEALTH_STATUS_ONLY = "health_status_only"
    OWNER_FULL = "owner_full"
    NONE = "none"


# Everything a health_status_only summary may say, beyond date digits.
STATUS_VOCABULARY = ("good health", "ill", "contagious", "not contagious")


@dataclass(frozen=True)
class RolePolicy:
    levels: dict[Role, DetailLevel] = field(
        default_factory=lambda: {
            Role.OWNER: DetailLevel.OWNER_FULL,
            Role.CAREGIVER: DetailLevel.FULL_MEDICAL,
            Role.DOCTOR: DetailLevel.FULL_MEDICAL,
            Role.HOUSEKEEPER: DetailLevel.HEALTH_STATUS_ONLY,
            Role.GUEST: DetailLevel.NONE,
        }
    )

    def __post_init__(self) -> None:
        missing = [r for r in Role if r not in self.levels]
        if missing:
            raise ValueError(f"role policy must cover every role; missing {missing}")
        if self.levels[Role.OWNER] is not DetailLevel.OWNER_FULL:
            raise ValueError("owner always maps to owner_full")

    def level_for(self, role: Role) -> DetailLevel:
        return self.levels[role]


class Generator(Protocol):
    def generate(self, prompt: str, context_items: Sequence[str]) -> str: ...


class TemplateGenerator:
    """Deterministic stand-in for a language model: fills a template with the
    prompt and whatever context it was handed."""

    def __init__(self, template: str = "{prompt}", snippet_chars: int = 80):
        self.template = template
        self.snippet_chars = snippet_chars

    def generate(self, prompt: str, context_items: Sequence[str]) -> str:
        snippets = "; ".join(c[: self.snippet_chars] for c in context_items)
        out = self.template.format(prompt=prompt, n=len(context_items), context=snippets)
        return out if out else prompt


@dataclass(frozen=True)
class Answer:
    text: str
    supporting_ids: tuple[str, ...]


ASK_NAME_TEXT = "May I ask your name?"


class DialogueManager:
    """Routes events to actions; owns the once-per-session ask-name memory.

    `emit` receives intermediate speak actions (the rephrased question) the
    moment they are ready; the engine wires it to the action log so the
    rephrase always lands in the log before the answer does.
    """

    def __init__(
        self,
        registry: SpeakerRegistry,
        policy: RolePolicy | None = None,
        small: Generator | None = None,
        large: Generator | None = None,
        provider: memory_mod.EmbeddingProvider | None = None,
        workspace_fn: Callable[[], VectorBase] | None = None,
        answer_k: int = 4,
        emit: Callable[[Action], None] | None = None,
    ):
        self.registry = registry
        self.policy = policy or RolePolicy()
        self.small = small or TemplateGenerator("You asked: {prompt}")
        self.large = large or TemplateGenerator("Drawing on {n} notes: {context}")
        self.provider = provider
        self.workspace_fn = workspace_fn
        self.answer_k = answer_k
        self.spoken: list[Action] = []
        self._emit = emit if emit is not None else self.spoken.append
        self._asked: set[tuple[str, str]] = set()  # (session_id, cluster_id)

    def reset_session(self, session_id: str) -> None:
        self._asked = {(s, c) for (s, c) in self._asked if s != session_id}

    def route_event(self, event: Event) -> Action:
        """Exactly one action per event; see the marker table in the README."""
        if event.kind is EventKind.SENSOR:
            if event.marker is Marker.SILENT:
                return Action(ActionKind.STORE_ONLY)
            return Action(ActionKind.SPEAK, text=event.payload)

        if event.kind is EventKind.UTTERANCE:
            registered = event.speaker in self.registry
            if not registered and event.marker is not Marker.ASK_NAME:
                key = (event.session_id, event.speaker)
                if key not in self._asked:
                    self._asked.add(key)
                    return Action(
                        ActionKind.ASK_QUESTION, text=ASK_NAME_TEXT, addressee=event.speaker
                    )
                return Action(ActionKind.STORE_ONLY)
            if event.marker is Marker.SILENT:
                return Action(ActionKind.STORE_ONLY)
            if event.marker is Marker.SUMMARY_REQUEST:
                return Action(ActionKind.RUN_SUMMARY, addressee=event.speaker)
            if event.marker is Marker.RECALL_REQUEST:
                return Action(ActionKind.RUN_RECALL, addressee=event.speaker)
            if event.marker is Marker.ASK_NAME:
                # the utterance is the reply to our name question
                return Action(ActionKind.STORE_ONLY, addressee=event.speaker)
            if event.marker is Marker.RESPOND:
                if self.provider is None or self.workspace_fn is None:
                    raise UnknownMarker("answer pipeline is not wired for respond events")
                self.rephrase(event.payload)
                ans = self.answer(
                    event.payload, self.workspace_fn(), self.provider, self.answer_k,
                    now=event.timestamp,
                )
                return Action(
                    ActionKind.SPEAK,
                    text=ans.text,
                    addressee=event.speaker,
                    supporting_ids=ans.supporting_ids,
                )
            raise UnknownMarker(f"no route for utterance marker {event.marker}")

        if event.kind in (EventKind.SYSTEM, EventKind.WEB_RESULT):
            if event.marker in (Marker.RESPOND, Marker.ALERT):
                return Action(ActionKind.SPEAK, text=event.payload, addressee=event.speaker)
            if event.marker is Marker.SILENT:
                return Action(ActionKind.STORE_ONLY)
            raise UnknownMarker(f"no route for {event.kind.value} marker {event.marker}")

        raise UnknownMarker(f"no route for event kind {event.kind}")

    # -- answer pipeline ---------------------------------------------------

    def rephrase(self, question: str) -> str:
        """Restate the question via the small generator and emit it to the
        speech sink right away so answer construction can overlap."""
        if not question:
            raise EmptyQuestion("cannot rephrase an empty question")
        text = self.small.generate(question, ())
        self._emit(Action(ActionKind.SPEAK, text=text))
        return text

    def answer(
        self,
        question: str,
        workspace: VectorBase,
        provider: memory_mod.EmbeddingProvider,
        k: int = 4,
        now: datetime | None = None,
    ) -> Answer:
        """Retrieve top-k supporting items and build the answer over them."""
        if not question:
            raise EmptyQuestion("cannot answer an empty question")
        hits = retrieve(provider.embed(question), workspace, k, now=now)
        text = self.large.generate(question, [item.text for item, _ in hits])
        return Answer(text=text, supporting_ids=tuple(item.item_id for item, _ in hits))


def summarize_session(
    session_id: str,
    requester_role: Role,
    policy: RolePolicy,
    transcripts,
    sessions,
    large: Generator,
    owner_notes: Sequence[str] = (),
    display: Callable[[str], str] | None = None,
) -> str:
    """Role-adapted consultation summary.

    full_medical/owner_full get a generator summary over the session's turns
    (owner_full additionally sees owner-private notes); health_status_only
    gets only the date and the recorded status words; none is denied.
    """
    level = policy.level_for(requester_role)
    if level is DetailLevel.NONE:
        raise PermissionDenied(f"role {requester_role.value} may not request summaries")
    if not sessions.known(session_id):
        raise UnknownSession(f"no session {session_id}")
    date = sessions.get(session_id, "date", "")

    if level is DetailLevel.HEALTH_STATUS_ONLY:
        status = sessions.get(session_id, "status", "good health")
        return f"{date}: {status}" if date else status

    name = display or (lambda s: s)
    turns = transcripts.query_turns(session=session_id)
    lines = [f"{name(t.speaker)}: {t.text}" for t in turns if t.text]
    text = large.generate(f"Summarize session {session_id}", lines)
    if level is DetailLevel.OWNER_FULL and owner_notes:
        text = text + " Private notes: " + " | ".join(owner_notes)
    return text


@dataclass(frozen=True)
class RecallResult:
    metric: str
    value: float
    timestamp: datetime


def recall_query(
    metric: str,
    anchor_name: str,
    day: str,
    readings,
    anchors: Sequence[tuple[str, datetime]],
    window_s: float = 1800.0,
) -> RecallResult:
    """First reading of `metric` at or after the day's anchor event, within
    the recall window (default 30 minutes)."""
    try:
        kind = SensorKind(metric)
    except ValueError:
        raise NoSuchMetric(f"unknown metric {metric!r}")
    anchor_ts = None
    for name, ts in anchors:
        if name == anchor_name and ts.date().isoformat() == day:
            if anchor_ts is None or ts < anchor_ts:
                anchor_ts = ts
    if anchor_ts is None:
        raise AnchorNotFound(f"no {anchor_name!r} event on {day}")
    deadline = anchor_ts + timedelta(seconds=window_s)
    for r in readings:
        if r.kind is kind and anchor_ts <= r.timestamp <= deadline:
            if isinstance(r.value, tuple):
                continue
            return RecallResult(metric, float(r.value), r.timestamp)
    raise NoReadingInWindow(
        f"no {metric} reading within {window_s:.0f}s after {anchor_name} on {day}"
    )
