"""Unit-vector helpers shared by diarization and memory.

All embeddings in the engine are L2-normalized float64 arrays, so cosine
similarity reduces to a dot product.  Serialization is base64 of the raw
little-endian float64 bytes: round trips are bit-exact, which the replay
determinism guarantee relies on.
"""

from __future__ import annotations

import base64
import hashlib

import numpy as np

UNIT_NORM_TOL = 1e-6


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def normalize(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def is_unit(v: np.ndarray, tol: float = UNIT_NORM_TOL) -> bool:
    return abs(np.linalg.norm(v) - 1.0) <= tol


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity for unit vectors (plain dot product)."""
    return float(np.dot(a, b))


def stable_hash(*parts: object) -> int:
    """Deterministic 64-bit hash, independent of PYTHONHASHSEED."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")


def seeded_rng(*parts: object) -> np.random.Generator:
    return np.random.default_rng(stable_hash(*parts))


def random_unit(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d)
    return normalize(v)


def direction_for(seed: int, name: str, d: int) -> np.ndarray:
    """Fixed synthetic direction for a named voice, derived from the seed."""
    return random_unit(seeded_rng(seed, "direction", name), d)


def noisy_copy(rng: np.random.Generator, direction: np.ndarray, noise: float) -> np.ndarray:
    """Unit vector near `direction`; noise is the length of the random offset."""
    v = direction + noise * random_unit(rng, direction.shape[0])
    return normalize(v)


def encode_vector(v: np.ndarray) -> str:
    return base64.b64encode(np.asarray(v, dtype=np.float64).tobytes()).decode("ascii")


def decode_vector(s: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(s.encode("ascii")), dtype=np.float64).copy()
