"""Pipeline settings.

Every tunable lives under a dotted key (``bg.match_radius``, ``track.max_age``
...). Files may nest the keys by section or spell them flat; unknown keys are
rejected so typos fail loudly instead of silently using a default.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import yaml

from sentinel.core import ConfigurationError

CONFIG_ENV = "SENTINEL_CONFIG"


@dataclass
class BackgroundConfig:
    long_interval: int = 50
    short_interval: int = 3
    samples: int = 20
    match_radius: float = 20.0
    # a pixel is background only when every sample agrees, so a deposited
    # object stays in the long-term foreground until the buffer has fully turned over
    min_consensus: int = 20
    coverage_threshold: float = 0.5


@dataclass
class DetectionConfig:
    categories: Tuple[str, ...] = ("person", "bag", "backpack", "suitcase", "laptop", "box", "monitor")
    roi_margin: int = 8
    dedup_iou: float = 0.5
    confirm_frames: int = 3


@dataclass
class TrackConfig:
    iou_min: float = 0.3
    max_age: int = 25
    min_hits: int = 3


@dataclass
class IdentityConfig:
    threshold: float = 0.5
    samples: int = 20
    embedder: str = "histogram"
    reverify_growth: int = 5


@dataclass
class OwnershipConfig:
    window_s: float = 2.0
    abandon_timeout_s: float = 30.0
    edge_margin_pct: float = 5.0
    ownerless_abandon: bool = True

    def edge_margin(self, width: int, height: int) -> int:
        return max(1, int(round(min(width, height) * self.edge_margin_pct / 100.0)))


@dataclass
class EventConfig:
    tau_move: float = 0.3
    iou_keep: float = 0.5
    move_confirm_frames: int = 5
    exit_regions: List[Tuple[int, int, int, int]] = field(default_factory=list)


@dataclass
class MockConfig:
    jitter_px: int = 0
    miss_rate: float = 0.0
    fp_rate: float = 0.0


@dataclass
class EvalConfig:
    tolerance_s: float = 5.0


_SECTIONS = {
    "bg": ("bg", BackgroundConfig),
    "det": ("det", DetectionConfig),
    "track": ("track", TrackConfig),
    "id": ("identity", IdentityConfig),
    "own": ("own", OwnershipConfig),
    "ev": ("ev", EventConfig),
    "mock": ("mock", MockConfig),
    "eval": ("eval", EvalConfig),
}

_RANGES: Dict[str, Tuple[float, float]] = {
    "bg.long_interval": (1, 10_000),
    "bg.short_interval": (1, 10_000),
    "bg.samples": (1, 256),
    "bg.match_radius": (0, 442),
    "bg.min_consensus": (1, 256),
    "bg.coverage_threshold": (0, 1),
    "det.roi_margin": (0, 1000),
    "det.dedup_iou": (0, 1),
    "det.confirm_frames": (1, 1000),
    "track.iou_min": (0, 1),
    "track.max_age": (0, 100_000),
    "track.min_hits": (1, 1000),
    "id.threshold": (0, 1),
    "id.samples": (1, 1000),
    "id.reverify_growth": (1, 1000),
    "own.window_s": (0, 3600),
    "own.abandon_timeout_s": (0, 86_400),
    "own.edge_margin_pct": (0, 50),
    "ev.tau_move": (0, 1),
    "ev.iou_keep": (0, 1),
    "ev.move_confirm_frames": (1, 1000),
    "mock.jitter_px": (0, 1000),
    "mock.miss_rate": (0, 1),
    "mock.fp_rate": (0, 1),
    "eval.tolerance_s": (0, 86_400),
}


@dataclass
class Config:
    bg: BackgroundConfig = field(default_factory=BackgroundConfig)
    det: DetectionConfig = field(default_factory=DetectionConfig)
    track: TrackConfig = field(default_factory=TrackConfig)
    identity: IdentityConfig = field(default_factory=IdentityConfig)
    own: OwnershipConfig = field(default_factory=OwnershipConfig)
    ev: EventConfig = field(default_factory=EventConfig)
    mock: MockConfig = field(default_factory=MockConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)

    @classmethod
    def keys(cls) -> List[str]:
        out = []
        for prefix, (attr, section) in _SECTIONS.items():
            out.extend(f"{prefix}.{f.name}" for f in dataclasses.fields(section))
        return out

    def get(self, key: str) -> Any:
        prefix, name = _split(key)
        return getattr(getattr(self, _SECTIONS[prefix][0]), name)

    def set(self, key: str, value: Any) -> None:
        prefix, name = _split(key)
        section = getattr(self, _SECTIONS[prefix][0])
        current = getattr(section, name)
        setattr(section, name, _coerce(key, current, value))

    def update(self, values: Mapping[str, Any]) -> "Config":
        for key, value in flatten(values).items():
            self.set(key, value)
        self.validate()
        return self

    def validate(self) -> None:
        for key, (lo, hi) in _RANGES.items():
            v = self.get(key)
            if not lo <= v <= hi:
                raise ConfigurationError(f"{key}={v} outside [{lo}, {hi}]")
        if self.bg.min_consensus > self.bg.samples:
            raise ConfigurationError("bg.min_consensus cannot exceed bg.samples")
        if "person" not in self.det.categories:
            raise ConfigurationError("det.categories must include 'person'")
        if self.identity.embedder not in ("histogram", "oracle"):
            raise ConfigurationError(f"id.embedder must be histogram|oracle, got {self.identity.embedder!r}")
        for region in self.ev.exit_regions:
            if len(region) != 4 or region[2] <= 0 or region[3] <= 0:
                raise ConfigurationError(f"bad exit region {region!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {key: self.get(key) for key in self.keys()}


def _split(key: str) -> Tuple[str, str]:
    prefix, _, name = key.partition(".")
    if prefix not in _SECTIONS or not name:
        raise ConfigurationError(f"unknown config key {key!r}")
    section = _SECTIONS[prefix][1]
    if name not in {f.name for f in dataclasses.fields(section)}:
        raise ConfigurationError(f"unknown config key {key!r}")
    return prefix, name


def _coerce(key: str, current: Any, value: Any) -> Any:
    try:
        if isinstance(current, bool):
            if isinstance(value, str):
                if value.lower() in ("1", "true", "yes", "on"):
                    return True
                if value.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(value)
            return bool(value)
        if isinstance(current, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if isinstance(current, float):
            return float(value)
        if isinstance(current, tuple):
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            return tuple(str(v) for v in value)
        if isinstance(current, list):
            if isinstance(value, str):
                value = yaml.safe_load(value)
            return [tuple(int(c) for c in region) for region in value]
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad value for {key}: {value!r}") from exc


def flatten(values: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for k, v in values.items():
        key = f"{prefix}.{k}" if prefix else str(k)
        if isinstance(v, Mapping):
            flat.update(flatten(v, key))
        else:
            flat[key] = v
    return flat


def load_config(path: Optional[os.PathLike] = None, overrides: Optional[Mapping[str, Any]] = None) -> Config:
    """Defaults <- file (``path`` or $SENTINEL_CONFIG) <- overrides."""
    cfg = Config()
    if path is None and os.environ.get(CONFIG_ENV):
        path = os.environ[CONFIG_ENV]
    if path is not None:
        try:
            data = yaml.safe_load(Path(path).read_text()) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, Mapping):
            raise ConfigurationError(f"config {path} must be a mapping")
        cfg.update(data)
    if overrides:
        cfg.update(overrides)
    cfg.validate()
    return cfg
