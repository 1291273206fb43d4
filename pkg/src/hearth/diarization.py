"""Online speaker diarization over pre-extracted segment embeddings.

Each incoming segment is matched against registered speaker centroids first
(threshold theta_reg), then against this session's anonymous clusters
(theta_anon), else it seeds a new anonymous cluster.  Matching is cosine on
unit vectors; a matched centroid is updated by running mean and renormalized.

The centroid state is kept as the raw running *sum* of assigned vectors plus
a count, accumulated strictly in arrival order.  That makes the incremental
pipeline bit-identical to an oracle that re-adds the assigned vectors from
scratch at every step, which is how the clustering is verified.

Anonymous clusters live for the session only; promoting one moves its
centroid into the registry and relabels its historical turns via the
transcript alias table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from . import vectors
from .errors import HearthError


class Role(str, Enum):
    OWNER = "owner"
    CAREGIVER = "caregiver"
    DOCTOR = "doctor"
    HOUSEKEEPER = "housekeeper"
    GUEST = "guest"


class EmptySamples(HearthError):
    pass


class DimensionMismatch(HearthError):
    pass


class DuplicateOwner(HearthError):
    pass


class DegenerateCentroid(HearthError):
    pass


class UnenrolledOwner(HearthError):
    pass


class UnknownCluster(HearthError):
    pass


class UnsortedInput(HearthError):
    pass


class EmptyReference(HearthError):
    pass


@dataclass(frozen=True, eq=False)
class SegmentEmbedding:
    vector: np.ndarray
    t_start: float
    t_end: float
    session_id: str = "default"

    def __post_init__(self) -> None:
        if self.t_end <= self.t_start:
            raise ValueError("segment must have t_end > t_start")
        if not vectors.is_unit(self.vector):
            raise ValueError("segment vector must be unit length")


@dataclass
class SpeakerProfile:
    speaker_id: str
    name: str
    role: Role
    vec_sum: np.ndarray | None
    sample_count: int = 0

    @property
    def centroid(self) -> np.ndarray | None:
        if self.sample_count == 0 or self.vec_sum is None:
            return None
        return vectors.normalize(self.vec_sum)

    def absorb(self, v: np.ndarray) -> None:
        self.vec_sum = v.copy() if self.vec_sum is None else self.vec_sum + v
        self.sample_count += 1


class SpeakerRegistry:
    """Registered speaker profiles; at most one may hold the owner role."""

    def __init__(self, d: int):
        self.d = d
        self.profiles: dict[str, SpeakerProfile] = {}
        self._next = 1

    def enroll(self, name: str, role: Role, samples: Sequence[SegmentEmbedding]) -> SpeakerProfile:
        if not samples:
            raise EmptySamples("enrollment requires at least one sample")
        for s in samples:
            if s.vector.shape != (self.d,):
                raise DimensionMismatch(
                    f"sample dimension {s.vector.shape[0]} != configured {self.d}"
                )
        if role is Role.OWNER and self.owner() is not None:
            raise DuplicateOwner("an owner profile is already enrolled")
        vec_sum = samples[0].vector.copy()
        for s in samples[1:]:
            vec_sum = vec_sum + s.vector
        if vectors.norm(vec_sum) < 1e-9 * len(samples):
            raise DegenerateCentroid("sample mean is numerically zero")
        profile = SpeakerProfile(
            speaker_id=f"s{self._next:03d}",
            name=name,
            role=role,
            vec_sum=vec_sum,
            sample_count=len(samples),
        )
        self._next += 1
        self.profiles[profile.speaker_id] = profile
        return profile

    def register_profile(self, name: str, role: Role, vec_sum: np.ndarray | None,
                         sample_count: int) -> SpeakerProfile:
        """Used by cluster promotion and text-path speakers (no samples yet)."""
        if role is Role.OWNER and self.owner() is not None:
            raise DuplicateOwner("an owner profile is already enrolled")
        profile = SpeakerProfile(f"s{self._next:03d}", name, role, vec_sum, sample_count)
        self._next += 1
        self.profiles[profile.speaker_id] = profile
        return profile

    def owner(self) -> SpeakerProfile | None:
        for p in self.profiles.values():
            if p.role is Role.OWNER:
                return p
        return None

    def get(self, speaker_id: str) -> SpeakerProfile | None:
        return self.profiles.get(speaker_id)

    def by_name(self, name: str) -> SpeakerProfile | None:
        folded = name.casefold()
        for p in self.profiles.values():
            if p.name.casefold() == folded:
                return p
        return None

    def __contains__(self, speaker_id: str) -> bool:
        return speaker_id in self.profiles


@dataclass
class _Cluster:
    cluster_id: str
    vec_sum: np.ndarray | None
    sample_count: int

    @property
    def centroid(self) -> np.ndarray | None:
        if self.sample_count == 0 or self.vec_sum is None:
            return None
        return vectors.normalize(self.vec_sum)

    def absorb(self, v: np.ndarray) -> None:
        self.vec_sum = v.copy() if self.vec_sum is None else self.vec_sum + v
        self.sample_count += 1


class ClusteringState:
    """Anonymous clusters plus the matching thresholds for one session."""

    def __init__(self, theta_reg: float, theta_anon: float, tau_owner: float):
        if theta_reg < theta_anon:
            raise ValueError("theta_reg must be >= theta_anon")
        self.theta_reg = theta_reg
        self.theta_anon = theta_anon
        self.tau_owner = tau_owner
        self.clusters: dict[str, _Cluster] = {}
        self._next = 1

    def new_cluster(self, seed_vector: np.ndarray | None) -> _Cluster:
        cluster = _Cluster(f"anon-{self._next}", None, 0)
        self._next += 1
        if seed_vector is not None:
            cluster.absorb(seed_vector)
        self.clusters[cluster.cluster_id] = cluster
        return cluster

    def drop(self, cluster_id: str) -> _Cluster:
        if cluster_id not in self.clusters:
            raise UnknownCluster(f"no anonymous cluster {cluster_id}")
        return self.clusters.pop(cluster_id)

    def reset_session(self) -> None:
        """Anonymous voiceprints are not retained across sessions."""
        self.clusters.clear()


class AssignmentKind(str, Enum):
    REGISTERED = "registered"
    ANONYMOUS = "anonymous"
    NEW_CLUSTER = "new_cluster"


@dataclass(frozen=True)
class SpeakerAssignment:
    kind: AssignmentKind
    id: str
    similarity: float | None


def _best_match(vector: np.ndarray, candidates: Iterable[tuple[str, np.ndarray | None, int]]):
    """Highest-cosine candidate; ties go to higher sample count, then lexicographic id."""
    scored = [
        (vectors.cosine(vector, centroid), count, cid)
        for cid, centroid, count in candidates
        if centroid is not None
    ]
    if not scored:
        return None
    scored.sort(key=lambda item: (-item[0], -item[1], item[2]))
    sim, _, cid = scored[0]
    return cid, sim


def assign_segment(
    seg: SegmentEmbedding, registry: SpeakerRegistry, state: ClusteringState
) -> SpeakerAssignment:
    if seg.vector.shape != (registry.d,):
        raise DimensionMismatch(
            f"segment dimension {seg.vector.shape[0]} != configured {registry.d}"
        )
    best_reg = _best_match(
        seg.vector,
        ((p.speaker_id, p.centroid, p.sample_count) for p in registry.profiles.values()),
    )
    if best_reg is not None and best_reg[1] >= state.theta_reg:
        speaker_id, sim = best_reg
        registry.profiles[speaker_id].absorb(seg.vector)
        return SpeakerAssignment(AssignmentKind.REGISTERED, speaker_id, sim)

    best_anon = _best_match(
        seg.vector,
        ((c.cluster_id, c.centroid, c.sample_count) for c in state.clusters.values()),
    )
    if best_anon is not None and best_anon[1] >= state.theta_anon:
        cluster_id, sim = best_anon
        state.clusters[cluster_id].absorb(seg.vector)
        return SpeakerAssignment(AssignmentKind.ANONYMOUS, cluster_id, sim)

    cluster = state.new_cluster(seg.vector)
    return SpeakerAssignment(AssignmentKind.NEW_CLUSTER, cluster.cluster_id, None)


def personal_vad_score(seg: SegmentEmbedding, owner: SpeakerProfile) -> float:
    """Owner-voice presence in [0, 1]; gate on score >= tau_owner."""
    centroid = owner.centroid
    if centroid is None:
        raise UnenrolledOwner("owner profile has no enrolled samples")
    return (1.0 + vectors.cosine(seg.vector, centroid)) / 2.0


@dataclass(frozen=True)
class SpeakerTurn:
    speaker: str
    t_start: float
    t_end: float

    def __post_init__(self) -> None:
        if self.t_end <= self.t_start:
            raise ValueError("turn must have t_end > t_start")


def diarize_session(
    segments: Sequence[SegmentEmbedding],
    registry: SpeakerRegistry,
    state: ClusteringState,
) -> list[SpeakerTurn]:
    """Assign every segment, then merge consecutive same-speaker runs into turns."""
    prev = None
    for seg in segments:
        if prev is not None and (seg.t_start < prev.t_start or seg.t_start < prev.t_end):
            raise UnsortedInput("segments must be time-ordered and non-overlapping")
        prev = seg
    turns: list[SpeakerTurn] = []
    current: tuple[str, float, float] | None = None
    for seg in segments:
        who = assign_segment(seg, registry, state).id
        if current is not None and current[0] == who:
            current = (who, current[1], seg.t_end)
        else:
            if current is not None:
                turns.append(SpeakerTurn(*current))
            current = (who, seg.t_start, seg.t_end)
    if current is not None:
        turns.append(SpeakerTurn(*current))
    return turns


def promote_cluster(
    cluster_id: str,
    name: str,
    role: Role,
    state: ClusteringState,
    registry: SpeakerRegistry,
    alias_sink: Callable[[str, str], None] | None = None,
) -> SpeakerProfile:
    """Turn an anonymous cluster into a registered profile.

    `alias_sink(cluster_id, speaker_id)` lets the caller relabel historical
    turns (the transcript store keeps an alias table rather than rewriting).
    """
    cluster = state.drop(cluster_id)
    try:
        profile = registry.register_profile(name, role, cluster.vec_sum, cluster.sample_count)
    except DuplicateOwner:
        state.clusters[cluster_id] = cluster  # undo the drop
        raise
    if alias_sink is not None:
        alias_sink(cluster_id, profile.speaker_id)
    return profile


def _elementary_intervals(
    reference: Sequence[SpeakerTurn], hypothesis: Sequence[SpeakerTurn]
) -> list[tuple[float, float, str | None, str | None]]:
    bounds = sorted({t for turn in (*reference, *hypothesis) for t in (turn.t_start, turn.t_end)})
    out = []
    for a, b in zip(bounds, bounds[1:]):
        mid = (a + b) / 2.0
        ref = next((t.speaker for t in reference if t.t_start <= mid < t.t_end), None)
        hyp = next((t.speaker for t in hypothesis if t.t_start <= mid < t.t_end), None)
        out.append((a, b, ref, hyp))
    return out


def compute_der(
    reference: Sequence[SpeakerTurn], hypothesis: Sequence[SpeakerTurn]
) -> float:
    """Diarization error rate under the best one-to-one speaker mapping.

    (missed + false alarm + confusion time) / total reference speech time.
    The mapping search is exhaustive, which is fine at desk scale (<= 10
    speakers a side).
    """
    if not reference:
        raise EmptyReference("reference turn list is empty")
    ref_total = sum(t.t_end - t.t_start for t in reference)
    intervals = _elementary_intervals(reference, hypothesis)

    overlap: dict[tuple[str, str], float] = {}
    for a, b, ref, hyp in intervals:
        if ref is not None and hyp is not None:
            overlap[(ref, hyp)] = overlap.get((ref, hyp), 0.0) + (b - a)

    ref_ids = sorted({r for r, _ in overlap})
    hyp_ids = sorted({h for _, h in overlap})
    best_map: dict[str, str] = {}
    best_score = -1.0
    if ref_ids and hyp_ids:
        if len(hyp_ids) <= len(ref_ids):
            options = (
                dict(zip(perm, hyp_ids))
                for perm in itertools.permutations(ref_ids, len(hyp_ids))
            )
        else:
            options = (
                dict(zip(ref_ids, perm))
                for perm in itertools.permutations(hyp_ids, len(ref_ids))
            )
        for mapping in options:  # mapping: ref -> hyp
            score = sum(overlap.get(pair, 0.0) for pair in mapping.items())
            if score > best_score:
                best_score = score
                best_map = mapping

    hyp_to_ref = {h: r for r, h in best_map.items()}
    error = 0.0
    for a, b, ref, hyp in intervals:
        if ref is None and hyp is None:
            continue
        if ref is None or hyp is None or hyp_to_ref.get(hyp) != ref:
            error += b - a
    return error / ref_total
