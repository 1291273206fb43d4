"""Engine configuration.

Everything tunable lives here with a documented default; a JSON config file
can override any subset of keys (see docs/formats.md for the key set).  The
seed fixes every stochastic choice the engine makes, so a (scenario, config,
seed) triple fully determines the replay output.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import time
from pathlib import Path

from .errors import HearthError


class ConfigError(HearthError):
    pass


@dataclass
class Config:
    # embeddings
    d: int = 64
    seed: int = 7

    # diarization thresholds
    theta_reg: float = 0.6
    theta_anon: float = 0.5
    tau_owner: float = 0.7

    # memory chunking and retention
    chunk_size: int = 512
    chunk_overlap: int = 64
    temp_ttl_days: float = 7.0
    event_ttl_days: float = 1.0
    rollover_time: time = time(4, 0)
    answer_k: int = 4

    # sensor fusion rules
    cooking_door_window_s: float = 600.0
    eating_min_s: float = 900.0
    resting_min_s: float = 1800.0
    gap_other_min_s: float = 300.0
    pose_walk_hz: float = 0.5
    pose_lie_deg: float = 60.0
    pose_sit_var: float = 0.05

    # automation
    night_start: time = time(23, 0)
    night_end: time = time(6, 0)
    briefing_time: time = time(7, 0)
    watch_check_time: time = time(6, 30)
    sync_interval_hours: float = 6.0
    watch_rules_path: str | None = None
    wake_on_alert: bool = False

    # dialogue
    recall_window_s: float = 1800.0

    # gateway
    pii_lexicon_path: str | None = None

    # shell
    data_dir: str = "data"
    offline: bool = False
    host: str = "127.0.0.1"
    port: int = 8750

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ConfigError("embedding dimension must be at least 2")
        for name in ("theta_reg", "theta_anon", "tau_owner"):
            v = getattr(self, name)
            if not -1.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [-1, 1], got {v}")
        if self.theta_reg < self.theta_anon:
            raise ConfigError("theta_reg must be >= theta_anon")
        if not 0.0 <= self.tau_owner <= 1.0:
            raise ConfigError("tau_owner must lie in [0, 1]")
        if self.chunk_size <= 0:
            raise ConfigError("chunk_size must be positive")
        if not 0 <= self.chunk_overlap < self.chunk_size:
            raise ConfigError("chunk_overlap must satisfy 0 <= overlap < chunk_size")
        if self.answer_k < 0:
            raise ConfigError("answer_k must be non-negative")

    _TIME_KEYS = ("rollover_time", "night_start", "night_end", "briefing_time", "watch_check_time")

    @classmethod
    def from_dict(cls, raw: dict) -> "Config":
        kwargs = dict(raw)
        unknown = set(kwargs) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in cls._TIME_KEYS:
            if key in kwargs and isinstance(kwargs[key], str):
                kwargs[key] = time.fromisoformat(kwargs[key])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}")
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must contain a JSON object")
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in self._TIME_KEYS:
            out[key] = out[key].isoformat(timespec="minutes")
        return out
