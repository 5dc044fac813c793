"""Per-frame detector output: the data model and its line-delimited JSON format.

A stream file is one header object followed by one object per frame. Image
coordinates are used throughout (pixels, y pointing down).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import InvariantViolation, MalformedDocument, SchemaViolation

# MPII 16-keypoint order; serialization follows it.
JOINTS = (
    "r_ankle", "r_knee", "r_hip", "l_hip", "l_knee", "l_ankle",
    "pelvis", "thorax", "upper_neck", "head_top",
    "r_wrist", "r_elbow", "r_shoulder", "l_shoulder", "l_elbow", "l_wrist",
)
JOINT_INDEX = {name: i for i, name in enumerate(JOINTS)}


class Facing(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> int:
        """+1 when the pool lies toward increasing x."""
        return 1 if self is Facing.RIGHT else -1

    def flipped(self) -> Facing:
        return Facing.LEFT if self is Facing.RIGHT else Facing.RIGHT


@dataclass(frozen=True)
class Pose:
    """16 joints as ``(x, y, confidence)`` triples in ``JOINTS`` order.

    Confidence 0 marks a joint the detector did not see.
    """

    coords: tuple

    def __post_init__(self):
        if len(self.coords) != len(JOINTS):
            raise InvariantViolation("pose", f"expected {len(JOINTS)} joints, got {len(self.coords)}")
        for name, (x, y, c) in zip(JOINTS, self.coords):
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InvariantViolation(f"pose.{name}", "coordinates must be finite")
            if not 0.0 <= c <= 1.0:
                raise InvariantViolation(f"pose.{name}", "confidence must lie in [0, 1]")

    def __getitem__(self, name):
        return self.coords[JOINT_INDEX[name]]

    def xy(self, name):
        x, y, _ = self.coords[JOINT_INDEX[name]]
        return x, y

    @classmethod
    def from_mapping(cls, mapping) -> Pose:
        return cls(tuple(tuple(mapping[name]) for name in JOINTS))

    @classmethod
    def from_array(cls, xy, conf) -> Pose:
        return cls(tuple((float(p[0]), float(p[1]), float(c)) for p, c in zip(xy, conf)))

    def to_mapping(self) -> dict:
        return {name: list(c) for name, c in zip(JOINTS, self.coords)}


@dataclass(frozen=True)
class SplashObservation:
    area: float
    bbox: tuple  # (x, y, width, height)

    def __post_init__(self):
        if not (math.isfinite(self.area) and self.area >= 0):
            raise InvariantViolation("splash.area", "must be finite and >= 0")
        if len(self.bbox) != 4 or not all(math.isfinite(v) for v in self.bbox):
            raise InvariantViolation("splash.bbox", "must be four finite numbers")
        if self.bbox[2] < 0 or self.bbox[3] < 0:
            raise InvariantViolation("splash.bbox", "width and height must be >= 0")


@dataclass(frozen=True)
class PlatformGeometry:
    edge_x: float
    edge_y: float
    facing: Facing
    water_y: float

    def __post_init__(self):
        if not self.water_y > self.edge_y:
            raise InvariantViolation("platform.water_y", "water must lie below the platform edge")

    @property
    def edge_point(self):
        return self.edge_x, self.edge_y


@dataclass(frozen=True)
class FrameSymbols:
    frame_index: int
    pose: Optional[Pose] = None
    splash: Optional[SplashObservation] = None


@dataclass(frozen=True)
class SymbolStream:
    clip_id: str
    fps: float
    frame_size: tuple  # (width, height)
    platform: PlatformGeometry
    frames: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not isinstance(self.frames, tuple):
            object.__setattr__(self, "frames", tuple(self.frames))
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise InvariantViolation("fps", "must be positive")
        width, height = self.frame_size
        if not (width > 0 and height > 0):
            raise InvariantViolation("frame_size", "must be positive")
        if len(self.frames) < 2:
            raise InvariantViolation("frames", "a stream needs at least two frames")
        prev = -1
        for fr in self.frames:
            if fr.frame_index < 0 or fr.frame_index <= prev:
                raise InvariantViolation("frame_index", f"frame {fr.frame_index} is not strictly increasing")
            prev = fr.frame_index
            if fr.splash is not None:
                x, y, w, h = fr.splash.bbox
                if x < 0 or y < 0 or x + w > width or y + h > height:
                    raise InvariantViolation(
                        f"frames[{fr.frame_index}].splash.bbox", "outside the frame bounds")
        if not any(fr.pose is not None for fr in self.frames):
            raise InvariantViolation("frames", "no frame carries a pose")

    def __len__(self):
        return len(self.frames)

    @property
    def frame_area(self) -> float:
        return float(self.frame_size[0]) * float(self.frame_size[1])

    # Array views used by the rules. cached_property writes straight into
    # __dict__, which frozen dataclasses allow.
    @cached_property
    def frame_indices(self) -> np.ndarray:
        return np.array([fr.frame_index for fr in self.frames], dtype=int)

    @cached_property
    def _pose_arrays(self):
        n = len(self.frames)
        xy = np.full((n, len(JOINTS), 2), np.nan)
        conf = np.zeros((n, len(JOINTS)))
        for i, fr in enumerate(self.frames):
            if fr.pose is not None:
                arr = np.asarray(fr.pose.coords, dtype=float)
                xy[i] = arr[:, :2]
                conf[i] = arr[:, 2]
        xy.setflags(write=False)
        conf.setflags(write=False)
        return xy, conf

    @property
    def pose_xy(self) -> np.ndarray:
        """(frames, 16, 2) image coordinates, NaN where no pose."""
        return self._pose_arrays[0]

    @property
    def pose_conf(self) -> np.ndarray:
        return self._pose_arrays[1]

    @cached_property
    def splash_area(self) -> np.ndarray:
        return np.array([fr.splash.area if fr.splash is not None else np.nan for fr in self.frames])

    def position_of(self, frame_index: int) -> int:
        """Row of ``frame_index`` in ``frames`` (the index must exist)."""
        pos = int(np.searchsorted(self.frame_indices, frame_index))
        if pos >= len(self.frames) or self.frame_indices[pos] != frame_index:
            raise KeyError(frame_index)
        return pos

    def usable(self, joints, min_confidence) -> np.ndarray:
        """Per-frame mask: every joint in ``joints`` seen with enough confidence."""
        idx = [JOINT_INDEX[j] for j in joints]
        return np.all(self.pose_conf[:, idx] >= min_confidence, axis=1)

    def last_symbol_frame(self) -> int:
        for fr in reversed(self.frames):
            if fr.pose is not None or fr.splash is not None:
                return fr.frame_index
        return self.frames[-1].frame_index

    def with_frames(self, frames) -> SymbolStream:
        return replace(self, frames=tuple(frames))


# -- serialization ------------------------------------------------------------

def _header_dict(s: SymbolStream) -> dict:
    return {
        "clip_id": s.clip_id,
        "fps": s.fps,
        "frame_width": s.frame_size[0],
        "frame_height": s.frame_size[1],
        "platform": {
            "edge_x": s.platform.edge_x,
            "edge_y": s.platform.edge_y,
            "facing": s.platform.facing.value,
            "water_y": s.platform.water_y,
        },
    }


def _frame_dict(fr: FrameSymbols) -> dict:
    return {
        "frame_index": fr.frame_index,
        "pose": None if fr.pose is None else fr.pose.to_mapping(),
        "splash": None if fr.splash is None else {
            "area": fr.splash.area, "bbox": list(fr.splash.bbox)},
    }


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def serialize_stream(s: SymbolStream) -> bytes:
    lines = [_dumps(_header_dict(s))]
    lines.extend(_dumps(_frame_dict(fr)) for fr in s.frames)
    return ("\n".join(lines) + "\n").encode("utf-8")


def _require(obj, key, kinds, where):
    name = f"{where}.{key}" if where else key
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaViolation(name)
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, kinds):
        raise SchemaViolation(name, f"expected {'/'.join(k.__name__ for k in kinds)}")
    return value


_NUM = (int, float)


def _parse_pose(obj, where) -> Pose:
    if not isinstance(obj, dict):
        raise SchemaViolation(where, "expected an object or null")
    coords = []
    for name in JOINTS:
        triple = _require(obj, name, (list,), where)
        if len(triple) != 3 or any(isinstance(v, bool) or not isinstance(v, _NUM) for v in triple):
            raise SchemaViolation(f"{where}.{name}", "expected [x, y, confidence]")
        coords.append(tuple(triple))
    extra = set(obj) - set(JOINTS)
    if extra:
        raise SchemaViolation(f"{where}.{sorted(extra)[0]}", "unknown joint name")
    return Pose(tuple(coords))


def _parse_splash(obj, where) -> SplashObservation:
    area = _require(obj, "area", _NUM, where)
    bbox = _require(obj, "bbox", (list,), where)
    if len(bbox) != 4 or any(isinstance(v, bool) or not isinstance(v, _NUM) for v in bbox):
        raise SchemaViolation(f"{where}.bbox", "expected [x, y, width, height]")
    return SplashObservation(area, tuple(bbox))


def parse_stream(data) -> SymbolStream:
    """Parse and validate a stream document (bytes or str)."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"not UTF-8: {exc}") from None
    records = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise MalformedDocument(f"line {lineno}: {exc.msg}") from None
    if not records:
        raise MalformedDocument("empty document")

    head = records[0]
    if not isinstance(head, dict):
        raise SchemaViolation("header", "expected an object")
    clip_id = _require(head, "clip_id", (str,), "")
    fps = _require(head, "fps", _NUM, "")
    width = _require(head, "frame_width", _NUM, "")
    height = _require(head, "frame_height", _NUM, "")
    plat = _require(head, "platform", (dict,), "")
    facing_raw = _require(plat, "facing", (str,), "platform")
    try:
        facing = Facing(facing_raw)
    except ValueError:
        raise SchemaViolation("platform.facing", "expected 'left' or 'right'") from None
    platform = PlatformGeometry(
        edge_x=_require(plat, "edge_x", _NUM, "platform"),
        edge_y=_require(plat, "edge_y", _NUM, "platform"),
        facing=facing,
        water_y=_require(plat, "water_y", _NUM, "platform"),
    )

    frames = []
    for k, rec in enumerate(records[1:]):
        where = f"frames[{k}]"
        if not isinstance(rec, dict):
            raise SchemaViolation(where, "expected an object")
        index = _require(rec, "frame_index", (int,), where)
        if "pose" not in rec:
            raise SchemaViolation(f"{where}.pose")
        if "splash" not in rec:
            raise SchemaViolation(f"{where}.splash")
        pose = None if rec["pose"] is None else _parse_pose(rec["pose"], f"{where}.pose")
        splash = None if rec["splash"] is None else _parse_splash(rec["splash"], f"{where}.splash")
        frames.append(FrameSymbols(index, pose, splash))
    return SymbolStream(clip_id, fps, (width, height), platform, tuple(frames))


# -- gap filling --------------------------------------------------------------

def interpolate_poses(s: SymbolStream, max_gap: int) -> SymbolStream:
    """Fill runs of at most ``max_gap`` pose-less frames that sit between two posed frames.

    Coordinates are interpolated linearly in frame index; each joint's
    confidence is the smaller of its two endpoint confidences.
    """
    if max_gap < 0:
        raise ValueError("max_gap must be >= 0")
    frames = list(s.frames)
    posed = [i for i, fr in enumerate(frames) if fr.pose is not None]
    changed = False
    for a, b in zip(posed, posed[1:]):
        gap = b - a - 1
        if gap == 0 or gap > max_gap:
            continue
        pa = np.asarray(frames[a].pose.coords, dtype=float)
        pb = np.asarray(frames[b].pose.coords, dtype=float)
        fa, fb = frames[a].frame_index, frames[b].frame_index
        conf = np.minimum(pa[:, 2], pb[:, 2])
        for i in range(a + 1, b):
            t = (frames[i].frame_index - fa) / (fb - fa)
            xy = pa[:, :2] + t * (pb[:, :2] - pa[:, :2])
            frames[i] = replace(frames[i], pose=Pose.from_array(xy, conf))
        changed = True
    return s.with_frames(frames) if changed else s


# -- geometric transforms (used by invariance checks and tools) -------------

def _map_pose(pose, fn):
    if pose is None:
        return None
    return Pose(tuple((*fn(x, y), c) for x, y, c in pose.coords))


def mirror_stream(s: SymbolStream) -> SymbolStream:
    """Flip the clip horizontally: x -> width - x, facing reversed."""
    width = s.frame_size[0]

    def fx(x, y):
        return width - x, y

    frames = []
    for fr in s.frames:
        splash = fr.splash
        if splash is not None:
            x, y, w, h = splash.bbox
            splash = SplashObservation(splash.area, (width - x - w, y, w, h))
        frames.append(FrameSymbols(fr.frame_index, _map_pose(fr.pose, fx), splash))
    p = s.platform
    platform = PlatformGeometry(width - p.edge_x, p.edge_y, p.facing.flipped(), p.water_y)
    return replace(s, platform=platform, frames=tuple(frames))


def scale_stream(s: SymbolStream, factor: float) -> SymbolStream:
    """Scale every coordinate, the frame size and splash areas uniformly."""
    if not factor > 0:
        raise ValueError("factor must be positive")

    def fs(x, y):
        return x * factor, y * factor

    frames = []
    for fr in s.frames:
        splash = fr.splash
        if splash is not None:
            splash = SplashObservation(splash.area * factor * factor,
                                       tuple(v * factor for v in splash.bbox))
        frames.append(FrameSymbols(fr.frame_index, _map_pose(fr.pose, fs), splash))
    p = s.platform
    platform = PlatformGeometry(p.edge_x * factor, p.edge_y * factor, p.facing, p.water_y * factor)
    size = (s.frame_size[0] * factor, s.frame_size[1] * factor)
    return replace(s, frame_size=size, platform=platform, frames=tuple(frames))
