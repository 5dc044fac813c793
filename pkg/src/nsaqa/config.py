"""Analyzer thresholds and how they are loaded.

Precedence, lowest first: dataclass defaults, the JSON file named by the
``NSAQA_CONFIG`` environment variable (or an explicit path), then
``key=value`` overrides from the command line.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError

CONFIG_ENV_VAR = "NSAQA_CONFIG"


@dataclass(frozen=True)
class AnalyzerConfig:
    # somersault counter: a half rotation is counted when the torso comes
    # within this many degrees of the target vertical
    som_angle_threshold_deg: float = 75.0
    # takeoff ends once the nearest ankle is this far past the edge (torso lengths)
    takeoff_distance_threshold: float = 0.5
    # petal radii as fractions of the reference hip length
    petal_inner_radius: float = 0.5
    petal_outer_radius: float = 2.0
    # floor on the reference hip length, as a fraction of torso length
    petal_min_hip_ratio: float = 0.55
    # a petal must stay outside the inner radius for at least this many usable frames
    petal_min_frames: int = 2
    position_knee_tuck_deg: float = 110.0
    position_hip_tuck_deg: float = 110.0
    position_hip_pike_deg: float = 120.0
    position_straight_deg: float = 160.0
    # rotation (deg) away from rest/final orientation that marks somersault onset/offset
    som_onset_deg: float = 8.0
    # facing dead-band on the takeoff lean (deg)
    facing_deadband_deg: float = 5.0
    facing_window: int = 5
    max_gap: int = 3
    min_confidence: float = 0.1
    # distance-from-platform band (torso lengths)
    distance_band_low: float = 0.3
    distance_band_high: float = 2.0
    # frames searched before entry for the verticalness / entry-shape poses
    entry_window: int = 5
    verticalness_search: int = 10

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value <= 0 and f.name != "max_gap":
                raise ConfigError(f"{f.name} must be positive, got {value}")
        if self.max_gap < 0:
            raise ConfigError("max_gap must be >= 0")
        if not self.petal_inner_radius < self.petal_outer_radius:
            raise ConfigError("petal_inner_radius must be < petal_outer_radius")
        if not 0 < self.som_angle_threshold_deg < 90:
            raise ConfigError("som_angle_threshold_deg must lie in (0, 90)")
        if not self.min_confidence <= 1:
            raise ConfigError("min_confidence must be <= 1")
        if not self.distance_band_low < self.distance_band_high:
            raise ConfigError("distance band must be increasing")

    @property
    def distance_band_center(self) -> float:
        return 0.5 * (self.distance_band_low + self.distance_band_high)

    @classmethod
    def from_mapping(cls, mapping) -> AnalyzerConfig:
        return cls().replace(**mapping)

    def replace(self, **changes) -> AnalyzerConfig:
        known = {f.name: f for f in fields(self)}
        coerced = {}
        for key, value in changes.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            coerced[key] = _coerce(known[key], value)
        return dataclasses.replace(self, **coerced)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(f, value):
    kind = int if f.type in ("int", int) else float
    if isinstance(value, bool):
        raise ConfigError(f"{f.name}: expected a number, got {value!r}")
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{f.name}: expected {kind.__name__}, got {value!r}") from None
    if kind is int and isinstance(value, float) and value != out:
        raise ConfigError(f"{f.name}: expected an integer, got {value!r}")
    return out


def parse_overrides(pairs) -> dict:
    """Turn ``["key=value", ...]`` into a dict, rejecting malformed items."""
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override must look like key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def load_config(path=None, overrides=None, env=None) -> AnalyzerConfig:
    env = os.environ if env is None else env
    cfg = AnalyzerConfig()
    path = path or env.get(CONFIG_ENV_VAR)
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        cfg = cfg.replace(**data)
    if overrides:
        cfg = cfg.replace(**overrides)
    return cfg
