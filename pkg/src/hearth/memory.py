"""Tiered vector memory: permanent, temporary and workspace bases.

Documents are chunked, embedded and stored as MemoryItems keyed by a content
hash of (source, text), so re-ingesting the same material is a no-op.  The
workspace is the merged view the dialogue layer retrieves from: permanent
items plus every unexpired temporary item, merged as they arrive and rebuilt
at the daily rollover.

Retrieval is exact top-k cosine over the whole base.  Corpora here are desk
scale, so exactness is cheap and the ranking (ties broken by newer
created_at, then item id) can be verified against a brute-force sort.
"""

from __future__ import annotations

import hashlib
import heapq
import re
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from . import timeutil, vectors
from .errors import HearthError
from .store import AppendLog


class EmptyDocument(HearthError):
    pass


class DimensionMismatch(HearthError):
    pass


class Source(str, Enum):
    DOMAIN_DOC = "domain_doc"
    WEB_DOC = "web_doc"
    SENSOR_EVENT = "sensor_event"
    TRANSCRIPT = "transcript"
    SYSTEM = "system"


class BaseKind(str, Enum):
    PERMANENT = "permanent"
    TEMPORARY = "temporary"
    WORKSPACE = "workspace"


def item_id_for(text: str, source: Source) -> str:
    digest = hashlib.sha256(f"{source.value}\x1f{text}".encode("utf-8")).hexdigest()
    return digest[:16]


@dataclass(frozen=True, eq=False)
class MemoryItem:
    item_id: str
    vector: np.ndarray
    text: str
    source: Source
    created_at: datetime
    expires_at: datetime | None = None

    def __post_init__(self) -> None:
        if self.expires_at is not None and self.expires_at <= self.created_at:
            raise ValueError("expires_at must be after created_at")

    def expired(self, now: datetime) -> bool:
        return self.expires_at is not None and self.expires_at <= now


class VectorBase:
    def __init__(self, kind: BaseKind, items: Iterable[MemoryItem] = ()):
        self.kind = kind
        self.items: dict[str, MemoryItem] = {}
        for item in items:
            self.add(item)

    def add(self, item: MemoryItem) -> bool:
        """Insert unless the id is already present (first occurrence wins)."""
        if item.item_id in self.items:
            return False
        if self.kind is BaseKind.PERMANENT and item.expires_at is not None:
            raise ValueError("permanent items never carry expires_at")
        if self.kind is BaseKind.TEMPORARY and item.expires_at is None:
            raise ValueError("temporary items must carry expires_at")
        self.items[item.item_id] = item
        return True

    def remove(self, item_id: str) -> None:
        self.items.pop(item_id, None)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self.items


class EmbeddingProvider(Protocol):
    d: int

    def embed(self, text: str) -> np.ndarray: ...


class HashEmbeddingProvider:
    """Deterministic reference embedder: seeded hash projection of token counts.

    Each token lands on one of d axes with a hash-chosen sign; the result is
    normalized.  No model artifact, same text always gives the same vector,
    and overlapping vocabularies give correlated vectors, which is all the
    retrieval tests need.
    """

    def __init__(self, d: int, seed: int = 0):
        self.d = d
        self.seed = seed

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.d, dtype=np.float64)
        for token in re.findall(r"[a-z0-9]+", text.lower()):
            h = vectors.stable_hash(self.seed, "tok", token)
            sign = 1.0 if (h >> 32) & 1 else -1.0
            vec[h % self.d] += sign
        if not vec.any():
            vec[vectors.stable_hash(self.seed, "raw", text) % self.d] = 1.0
        return vectors.normalize(vec)


def chunk_text(text: str, chunk_size: int, overlap: int) -> list[str]:
    """Slices of at most chunk_size chars; consecutive chunks share `overlap`
    chars, and a cut prefers the last whitespace in the window when one
    exists past the midpoint."""
    if chunk_size <= 0 or overlap < 0 or overlap >= chunk_size:
        raise ValueError("need 0 <= overlap < chunk_size")
    chunks: list[str] = []
    start = 0
    while True:
        end = min(start + chunk_size, len(text))
        if end < len(text):
            window = text[start:end]
            cut = max(window.rfind(" "), window.rfind("\n"), window.rfind("\t"))
            if cut > max(chunk_size // 2, overlap):
                end = start + cut + 1
        chunks.append(text[start:end])
        if end >= len(text):
            return chunks
        start = end - overlap


def vectorize_document(
    text: str,
    source: Source,
    provider: EmbeddingProvider,
    now: datetime,
    chunk_size: int = 512,
    overlap: int = 64,
    ttl: timedelta | None = None,
) -> list[MemoryItem]:
    """Chunk, embed and wrap a document; item order preserves document order."""
    if not text:
        raise EmptyDocument("cannot vectorize an empty document")
    items = []
    for chunk in chunk_text(text, chunk_size, overlap):
        items.append(
            MemoryItem(
                item_id=item_id_for(chunk, source),
                vector=provider.embed(chunk),
                text=chunk,
                source=source,
                created_at=now,
                expires_at=None if ttl is None else now + ttl,
            )
        )
    return items


def merge_into_workspace(bases: Sequence[VectorBase], now: datetime) -> VectorBase:
    """Union by item id (first occurrence wins), dropping expired items."""
    workspace = VectorBase(BaseKind.WORKSPACE)
    for base in bases:
        for item in base.items.values():
            if not item.expired(now):
                workspace.add(item)
    return workspace


def ingest_event_item(
    text: str,
    source: Source,
    provider: EmbeddingProvider,
    workspace: VectorBase,
    temporary: VectorBase,
    now: datetime,
    ttl: timedelta,
    chunk_size: int = 512,
    overlap: int = 64,
) -> list[MemoryItem]:
    """Merge-as-they-arrive: the new items land in the temporary base and the
    live workspace in the same call."""
    items = vectorize_document(text, source, provider, now, chunk_size, overlap, ttl=ttl)
    for item in items:
        temporary.add(item)
        workspace.add(item)
    return items


def retrieve(
    query_vector: np.ndarray, base: VectorBase, k: int, now: datetime | None = None
) -> list[tuple[MemoryItem, float]]:
    """Exact top-k by cosine; ties broken by newer created_at then item id.

    With `now` given, items already expired at query time are never
    retrievable even if a rollover has not swept them yet."""
    if k < 0:
        raise ValueError("k must be non-negative")
    items = list(base.items.values())
    if now is not None:
        items = [i for i in items if not i.expired(now)]
    if not items or k == 0:
        return []
    if items[0].vector.shape != query_vector.shape:
        raise DimensionMismatch(
            f"query dimension {query_vector.shape[0]} != base dimension "
            f"{items[0].vector.shape[0]}"
        )
    matrix = np.stack([item.vector for item in items])
    sims = matrix @ query_vector
    ranked = heapq.nsmallest(
        k,
        zip(items, sims),
        key=lambda pair: (-pair[1], -timeutil.to_epoch(pair[0].created_at), pair[0].item_id),
    )
    return [(item, float(sim)) for item, sim in ranked]


def rollover_day(
    permanent: VectorBase,
    temporaries: Sequence[VectorBase],
    now: datetime,
) -> VectorBase:
    """Rebuild the workspace for a new day and purge expired temporaries."""
    for base in temporaries:
        for item_id in [i for i, item in base.items.items() if item.expired(now)]:
            base.remove(item_id)
    return merge_into_workspace([permanent, *temporaries], now)


class MemoryStore:
    """Persistence for the permanent and temporary bases.

    One record per item: id, kind, source, created_at, expires_at, base64
    vector, text.  The temporary file is compacted (rewritten) when rollover
    purges expired items; the permanent file only ever grows unless an item
    is administratively deleted through the shell.
    """

    def __init__(self, directory: str | Path, provider: EmbeddingProvider):
        self.root = Path(directory)
        self.root.mkdir(parents=True, exist_ok=True)
        self.provider = provider
        self.permanent = VectorBase(BaseKind.PERMANENT)
        self.temporary = VectorBase(BaseKind.TEMPORARY)
        self._perm_log = AppendLog(self.root / "permanent.mem")
        self._temp_log = AppendLog(self.root / "temporary.mem")
        for rec in self._perm_log.records():
            self.permanent.add(self._parse(rec))
        for rec in self._temp_log.records():
            self.temporary.add(self._parse(rec))

    @staticmethod
    def _parse(rec: list[str]) -> MemoryItem:
        item_id, _kind, source, created, expires, vec_b64, text = rec
        return MemoryItem(
            item_id=item_id,
            vector=vectors.decode_vector(vec_b64),
            text=text,
            source=Source(source),
            created_at=timeutil.parse_timestamp(created),
            expires_at=timeutil.parse_timestamp(expires) if expires else None,
        )

    @staticmethod
    def _fields(item: MemoryItem, kind: BaseKind) -> list[str]:
        return [
            item.item_id,
            kind.value,
            item.source.value,
            timeutil.fmt_timestamp(item.created_at),
            "" if item.expires_at is None else timeutil.fmt_timestamp(item.expires_at),
            vectors.encode_vector(item.vector),
            item.text,
        ]

    def add_permanent(self, item: MemoryItem) -> bool:
        if self.permanent.add(item):
            self._perm_log.append(self._fields(item, BaseKind.PERMANENT))
            return True
        return False

    def add_temporary(self, item: MemoryItem) -> bool:
        if self.temporary.add(item):
            self._temp_log.append(self._fields(item, BaseKind.TEMPORARY))
            return True
        return False

    def delete_permanent(self, item_id: str) -> bool:
        """Administrative deletion; the only path that removes permanent items."""
        if item_id not in self.permanent:
            return False
        self.permanent.remove(item_id)
        self._rewrite(self._perm_log, self.permanent, BaseKind.PERMANENT)
        return True

    def compact_temporary(self) -> None:
        self._rewrite(self._temp_log, self.temporary, BaseKind.TEMPORARY)

    def _rewrite(self, log: AppendLog, base: VectorBase, kind: BaseKind) -> None:
        log.close()
        log.path.unlink()
        fresh = AppendLog(log.path)
        for item in base.items.values():
            fresh.append(self._fields(item, kind))
        if kind is BaseKind.PERMANENT:
            self._perm_log = fresh
        else:
            self._temp_log = fresh

    def close(self) -> None:
        self._perm_log.close()
        self._temp_log.close()
