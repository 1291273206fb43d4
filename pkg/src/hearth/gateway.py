"""The only path to the outside world.

Rule-based, reversible PII redaction: registered speaker names, configured
location terms, calendar dates and long digit runs become category
placeholders before any text leaves the process.  External clients only
accept a RedactedQuery, which `anonymize_query` is the sole producer of, so
the egress gate is enforced by the type surface rather than by discipline.

Every real outbound call is counted and written to an audit log; with the
offline flag set, clients are never invoked at all and every gateway
operation still returns a well-defined (empty) result.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Protocol

from . import timeutil
from .errors import HearthError
from .store import AppendLog

logger = logging.getLogger(__name__)


class EmptyQuery(HearthError):
    pass


class ClientFailure(HearthError):
    pass


class PiiCategory(str, Enum):
    PERSON = "person"
    DATE = "date"
    IDENTIFIER = "identifier"
    LOCATION = "location"


_PLACEHOLDER_NAME = {
    PiiCategory.PERSON: "PERSON",
    PiiCategory.DATE: "DATE",
    PiiCategory.IDENTIFIER: "IDENTIFIER",
    PiiCategory.LOCATION: "LOCATION",
}

PLACEHOLDER_RE = re.compile(r"⟨(PERSON|DATE|IDENTIFIER|LOCATION)_(\d+)⟩")

# ISO dates, the common numeric day-first/month-first forms, and digit runs
# long enough to be identifiers (phone, insurance, account numbers).
_DATE_RE = re.compile(r"\b\d{4}-\d{2}-\d{2}\b|\b\d{1,2}[/.]\d{1,2}[/.]\d{2,4}\b")
_DIGIT_RUN_RE = re.compile(r"\d{6,}")


@dataclass(frozen=True)
class Redaction:
    placeholder: str
    original: str
    category: PiiCategory


@dataclass(frozen=True)
class RedactionMap:
    entries: tuple[Redaction, ...] = ()

    def originals(self) -> dict[str, str]:
        return {r.placeholder: r.original for r in self.entries}


@dataclass(frozen=True)
class RedactedQuery:
    """A query that has passed the anonymizer; the only type clients accept."""

    text: str
    map: RedactionMap


@dataclass
class PiiLexicon:
    """Configured extra PII terms, reviewable as a policy file."""

    locations: tuple[str, ...] = ()
    persons: tuple[str, ...] = ()
    identifiers: tuple[str, ...] = ()

    @classmethod
    def from_file(cls, path: str | Path) -> "PiiLexicon":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            locations=tuple(raw.get("locations", ())),
            persons=tuple(raw.get("persons", ())),
            identifiers=tuple(raw.get("identifiers", ())),
        )


def _term_spans(text: str, term: str, category: PiiCategory) -> list[tuple[int, int, PiiCategory]]:
    """Case-insensitive substring occurrences of a lexicon/registry term."""
    spans = []
    haystack = text.casefold()
    needle = term.casefold()
    if not needle:
        return spans
    start = 0
    while True:
        idx = haystack.find(needle, start)
        if idx < 0:
            return spans
        spans.append((idx, idx + len(needle), category))
        start = idx + 1


# Tie-break priority when two candidate spans start at the same offset with
# the same length: a person name beats a location beats a date beats an id.
_PRIORITY = {
    PiiCategory.PERSON: 0,
    PiiCategory.LOCATION: 1,
    PiiCategory.DATE: 2,
    PiiCategory.IDENTIFIER: 3,
}


def anonymize_query(text: str, registry, lexicon: PiiLexicon | None = None) -> RedactedQuery:
    """Replace PII spans with placeholders, longest match first, left to right.

    `registry` is anything with a `profiles` mapping of speaker profiles (the
    diarization registry); only the names matter here.
    """
    if not text:
        raise EmptyQuery("cannot anonymize an empty query")
    lexicon = lexicon or PiiLexicon()

    candidates: list[tuple[int, int, PiiCategory]] = []
    names = [p.name for p in getattr(registry, "profiles", {}).values()]
    for name in (*names, *lexicon.persons):
        candidates.extend(_term_spans(text, name, PiiCategory.PERSON))
    for term in lexicon.locations:
        candidates.extend(_term_spans(text, term, PiiCategory.LOCATION))
    for term in lexicon.identifiers:
        candidates.extend(_term_spans(text, term, PiiCategory.IDENTIFIER))
    for m in _DATE_RE.finditer(text):
        candidates.append((m.start(), m.end(), PiiCategory.DATE))
    for m in _DIGIT_RUN_RE.finditer(text):
        candidates.append((m.start(), m.end(), PiiCategory.IDENTIFIER))

    # Left to right; at equal starts prefer the longest span, then category.
    candidates.sort(key=lambda c: (c[0], -(c[1] - c[0]), _PRIORITY[c[2]]))

    counters = {c: 0 for c in PiiCategory}
    assigned: dict[tuple[PiiCategory, str], str] = {}
    entries: list[Redaction] = []
    out: list[str] = []
    cursor = 0
    for start, end, category in candidates:
        if start < cursor:
            continue  # overlaps an already-redacted span
        original = text[start:end]
        key = (category, original)
        placeholder = assigned.get(key)
        if placeholder is None:
            counters[category] += 1
            placeholder = f"⟨{_PLACEHOLDER_NAME[category]}_{counters[category]}⟩"
            assigned[key] = placeholder
            entries.append(Redaction(placeholder, original, category))
        out.append(text[cursor:start])
        out.append(placeholder)
        cursor = end
    out.append(text[cursor:])
    return RedactedQuery("".join(out), RedactionMap(tuple(entries)))


def deanonymize_text(text: str, redaction_map: RedactionMap) -> str:
    """Restore originals for every known placeholder; unknown ones stay put."""
    originals = redaction_map.originals()

    def _sub(m: re.Match) -> str:
        return originals.get(m.group(0), m.group(0))

    return PLACEHOLDER_RE.sub(_sub, text)


class SearchClient(Protocol):
    def search(self, query: RedactedQuery) -> list[tuple[str, str]]:
        """Returns (document name, document text) results."""
        ...


class WeatherClient(Protocol):
    def forecast(self, date: str) -> str: ...


class CorpusSearchClient:
    """Test double: 'searches the web' over a local directory of .txt files."""

    def __init__(self, corpus_dir: str | Path):
        self.corpus_dir = Path(corpus_dir)

    def search(self, query: RedactedQuery) -> list[tuple[str, str]]:
        stripped = PLACEHOLDER_RE.sub(" ", query.text)
        terms = re.findall(r"[a-z0-9]+", stripped.lower())
        hits = []
        for path in sorted(self.corpus_dir.glob("*.txt")):
            body = path.read_text(encoding="utf-8")
            lowered = body.lower()
            if terms and all(t in lowered for t in terms):
                hits.append((path.stem, body))
        return hits


class StaticWeatherClient:
    def __init__(self, text: str):
        self.text = text

    def forecast(self, date: str) -> str:
        return self.text


class EgressGate:
    """Counts and audits every outbound call; the offline switch kills them all."""

    def __init__(self, offline: bool, audit_dir: str | Path | None = None):
        self.offline = offline
        self.invocations = 0
        self._audit = None
        if audit_dir is not None:
            self._audit = AppendLog(Path(audit_dir) / "egress_audit.log")

    def _record(self, now: datetime, kind: str, payload: str) -> None:
        self.invocations += 1
        if self._audit is not None:
            self._audit.append([timeutil.fmt_timestamp(now), kind, payload])

    def audit_records(self) -> list[list[str]]:
        return self._audit.records() if self._audit is not None else []

    def search(self, client: SearchClient | None, query: RedactedQuery,
               now: datetime) -> list[tuple[str, str]]:
        if self.offline or client is None:
            return []
        self._record(now, "search", query.text)
        try:
            return client.search(query)
        except Exception as e:
            logger.warning("search client failed: %s", e)
            return []

    def weather(self, client: WeatherClient | None, date: str, now: datetime) -> str | None:
        if self.offline or client is None:
            return None
        self._record(now, "weather", date)
        try:
            return client.forecast(date)
        except Exception as e:
            logger.warning("weather client failed: %s", e)
            return None

    def fetch_labels(self, client, since: datetime, now: datetime):
        """Cloud label pull; returns None when offline/unconfigured."""
        if self.offline or client is None:
            return None
        self._record(now, "labels", timeutil.fmt_timestamp(since))
        return client.fetch_since(since)

    def close(self) -> None:
        if self._audit is not None:
            self._audit.close()


def web_search(
    query: str,
    registry,
    lexicon: PiiLexicon | None,
    gate: EgressGate,
    client: SearchClient | None,
    memory_store,
    workspace,
    now: datetime,
    ttl: timedelta,
    chunk_size: int = 512,
    overlap: int = 64,
) -> list:
    """Anonymize, search, and ingest results as temporary web_doc items.

    Offline or failing clients yield an empty result, never an error.
    """
    from . import memory as memory_mod

    if not query:
        raise EmptyQuery("cannot search an empty query")
    redacted = anonymize_query(query, registry, lexicon)
    results = gate.search(client, redacted, now)
    ingested = []
    for _name, body in results:
        items = memory_mod.vectorize_document(
            body, memory_mod.Source.WEB_DOC, memory_store.provider, now,
            chunk_size, overlap, ttl=ttl,
        )
        for item in items:
            if memory_store.add_temporary(item):
                ingested.append(item)
            workspace.add(item)
    return ingested
