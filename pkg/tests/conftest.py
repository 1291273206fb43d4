from __future__ import annotations

import numpy as np
import pytest

from hearth import vectors
from hearth.config import Config
from hearth.diarization import ClusteringState, Role, SegmentEmbedding, SpeakerRegistry

D = 64


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def config(tmp_path):
    return Config(data_dir=str(tmp_path / "data"), offline=True)


@pytest.fixture
def registry():
    return SpeakerRegistry(D)


@pytest.fixture
def state():
    return ClusteringState(theta_reg=0.6, theta_anon=0.5, tau_owner=0.7)


def make_segment(vec, t0=0.0, t1=1.0, session="test"):
    return SegmentEmbedding(vectors.normalize(np.asarray(vec, dtype=float)), t0, t1, session)


def segments_from(rng, direction, count, noise=0.2, t0=0.0, dur=1.0):
    segs = []
    for i in range(count):
        v = vectors.noisy_copy(rng, direction, noise)
        segs.append(SegmentEmbedding(v, t0 + i * dur, t0 + (i + 1) * dur, "test"))
    return segs


def enroll_speaker(registry, rng, name, role=Role.GUEST, count=10, noise=0.2):
    direction = vectors.random_unit(rng, registry.d)
    samples = segments_from(rng, direction, count, noise)
    profile = registry.enroll(name, role, samples)
    return profile, direction
