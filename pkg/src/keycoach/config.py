"""Service configuration: JSON file plus KEYCOACH_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

ENV_PREFIX = "KEYCOACH_"

_NOTE_NAMES = {
    "C": 0, "C#": 1, "DB": 1, "D": 2, "D#": 3, "EB": 3, "E": 4, "F": 5,
    "F#": 6, "GB": 6, "G": 7, "G#": 8, "AB": 8, "A": 9, "A#": 10, "BB": 10, "B": 11,
}


def parse_tonic(value) -> int:
    """Accept a pitch class number or a note name like 'C' / 'Eb'."""
    if isinstance(value, bool):
        raise ValueError(f"not a key: {value!r}")
    if isinstance(value, int):
        return value % 12
    name = str(value).strip().upper()
    if name in _NOTE_NAMES:
        return _NOTE_NAMES[name]
    raise ValueError(f"not a key: {value!r}")


@dataclass(frozen=True)
class AppConfig:
    port: int = 8765
    content_dir: str = "content"
    reports_dir: str = "reports"
    default_key: str = "C"
    default_tempo_bpm: float = 120.0
    swing_ratio: float = 1.0
    split_pitch: int = 60
    hit_window_ms: float = 100.0

    @property
    def tonic(self) -> int:
        return parse_tonic(self.default_key)

    def __post_init__(self) -> None:
        parse_tonic(self.default_key)
        if not 0 < self.port < 65536:
            raise ValueError(f"port out of range: {self.port}")
        if not 21 <= self.split_pitch <= 108:
            raise ValueError(f"split_pitch outside the keyboard: {self.split_pitch}")
        if self.default_tempo_bpm <= 0:
            raise ValueError(f"tempo must be positive: {self.default_tempo_bpm}")
        if not 1.0 <= self.swing_ratio <= 3.0:
            raise ValueError(f"swing_ratio out of range [1.0, 3.0]: {self.swing_ratio}")
        if self.hit_window_ms <= 0:
            raise ValueError(f"hit_window_ms must be positive: {self.hit_window_ms}")


_FIELD_TYPES = {
    "port": int,
    "content_dir": str,
    "reports_dir": str,
    "default_key": str,
    "default_tempo_bpm": float,
    "swing_ratio": float,
    "split_pitch": int,
    "hit_window_ms": float,
}


def load_config(
    path: Optional[Path | str] = None,
    env: Optional[Mapping[str, str]] = None,
) -> AppConfig:
    """Defaults, then the JSON file, then environment variables.

    Each config key maps to KEYCOACH_<KEY> uppercased, e.g.
    KEYCOACH_PORT or KEYCOACH_SPLIT_PITCH.
    """
    values: dict = {}
    if path is not None:
        doc = json.loads(Path(path).read_text())
        if not isinstance(doc, dict):
            raise ValueError("config file must hold a JSON object")
        for key, value in doc.items():
            if key not in _FIELD_TYPES:
                raise ValueError(f"unknown config key: {key}")
            values[key] = _FIELD_TYPES[key](value)
    env = os.environ if env is None else env
    for name in _FIELD_TYPES:
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = _FIELD_TYPES[name](raw)
    return AppConfig(**values)
