"""Dive recognition from framewise pose: armstand, rotation type, counts, position."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .config import AnalyzerConfig
from .errors import AmbiguousFacing, AmbiguousRotation, NoUsablePose
from .kinematics import (VERTICAL_DOWN, VERTICAL_UP, angles_between, joint_angles, rotation_series,
                         to_math, torso_length_reference)
from .segmentation import detect_entry, detect_somersault_range, detect_takeoff_end
from .symbols import JOINT_INDEX, SymbolStream


class RotationType(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    REVERSE = "reverse"
    INWARD = "inward"


class Position(str, Enum):
    STRAIGHT = "straight"
    PIKE = "pike"
    TUCK = "tuck"
    FREE = "free"


@dataclass(frozen=True)
class DiveDescriptor:
    armstand: bool
    rotation_type: RotationType
    half_somersaults: int
    half_twists: int
    position: Position

    def __post_init__(self):
        object.__setattr__(self, "rotation_type", RotationType(self.rotation_type))
        object.__setattr__(self, "position", Position(self.position))
        if self.half_somersaults < 0 or self.half_twists < 0:
            raise ValueError("rotation counts must be non-negative")

    def to_dict(self) -> dict:
        return {
            "armstand": self.armstand,
            "rotation_type": self.rotation_type.value,
            "half_somersaults": self.half_somersaults,
            "half_twists": self.half_twists,
            "position": self.position.value,
        }

    @classmethod
    def from_dict(cls, d) -> DiveDescriptor:
        return cls(bool(d["armstand"]), RotationType(d["rotation_type"]), int(d["half_somersaults"]),
                   int(d["half_twists"]), Position(d["position"]))

    def describe(self) -> str:
        def halves(n, unit):
            value = f"{n // 2}" if n % 2 == 0 else f"{n / 2:.1f}"
            return f"{value} {unit}{'' if n == 2 else 's'}"

        parts = ["armstand" if self.armstand else None, self.rotation_type.value,
                 halves(self.half_somersaults, "somersault")]
        if self.half_twists:
            parts.append(halves(self.half_twists, "twist"))
        parts.append(self.position.value)
        return " ".join(p for p in parts if p)


# -- armstand ---------------------------------------------------------------

def detect_armstand(s: SymbolStream, takeoff_end: int, cfg: Optional[AnalyzerConfig] = None) -> bool:
    """Inverted (pelvis above thorax) for most usable takeoff frames."""
    cfg = cfg or AnalyzerConfig()
    ok = (s.frame_indices < takeoff_end) & s.usable(("pelvis", "thorax"), cfg.min_confidence)
    if not ok.any():
        raise NoUsablePose("no usable takeoff pose for armstand detection")
    # image y grows downward: thorax below pelvis means inverted
    inverted = s.pose_xy[ok, JOINT_INDEX["thorax"], 1] > s.pose_xy[ok, JOINT_INDEX["pelvis"], 1]
    return bool(np.count_nonzero(inverted) * 2 > inverted.size)


# -- somersaults --------------------------------------------------------------

def somersault_increments(s: SymbolStream, takeoff_end: int, armstand: bool,
                          cfg: AnalyzerConfig) -> list:
    """Frames at which the half-somersault counter increments.

    The torso vector is compared against vertical-down when the count is even
    (odd for armstand starts) and vertical-up otherwise; the count goes up
    whenever it is within ``som_angle_threshold_deg`` of its target.
    """
    ok = (s.frame_indices >= takeoff_end) & s.usable(("pelvis", "thorax"), cfg.min_confidence)
    rows = np.flatnonzero(ok)
    vec = to_math(s.pose_xy[rows, JOINT_INDEX["thorax"]] - s.pose_xy[rows, JOINT_INDEX["pelvis"]])
    to_down = angles_between(vec, np.array(VERTICAL_DOWN))
    to_up = angles_between(vec, np.array(VERTICAL_UP))
    hits = []
    count = 0
    for i, row in enumerate(rows):
        want_down = (count % 2 == 1) if armstand else (count % 2 == 0)
        angle = to_down[i] if want_down else to_up[i]
        if angle <= cfg.som_angle_threshold_deg:
            count += 1
            hits.append(int(s.frame_indices[row]))
    return hits


def count_half_somersaults(s: SymbolStream, takeoff_end: int, armstand: bool,
                           cfg: AnalyzerConfig) -> int:
    return len(somersault_increments(s, takeoff_end, armstand, cfg))


# -- twists -------------------------------------------------------------------

@dataclass(frozen=True)
class Petal:
    start: int        # first frame outside the inner radius
    end: int          # last frame outside the inner radius
    peak: int
    peak_ratio: float  # peak |hip vector| / reference hip length
    span_start: int   # trough before the petal
    span_end: int     # trough after the petal


def hip_vectors(s: SymbolStream, rows) -> np.ndarray:
    return s.pose_xy[rows, JOINT_INDEX["l_hip"]] - s.pose_xy[rows, JOINT_INDEX["r_hip"]]


def find_petals(s: SymbolStream, takeoff_end: int, cfg: AnalyzerConfig, stop: Optional[int] = None):
    """Petals of the right-to-left hip vector trace after takeoff.

    Returns ``(petals, reference_hip_length_px)``. A petal begins when the
    hip-vector length rises from below the inner radius, needs its peak inside
    the outer radius, and ends when the length drops back below the inner
    radius.
    """
    fi = s.frame_indices
    window = fi >= takeoff_end
    if stop is not None:
        window &= fi < stop
    ok = window & s.usable(("r_hip", "l_hip"), cfg.min_confidence)
    rows = np.flatnonzero(ok)
    if rows.size == 0:
        raise NoUsablePose("no usable hip joints after takeoff")
    hv = hip_vectors(s, rows)
    mag = np.hypot(hv[:, 0], hv[:, 1])
    torso = torso_length_reference(s, cfg.min_confidence)
    ref = max(float(np.percentile(mag, 90)), cfg.petal_min_hip_ratio * torso)
    inner = cfg.petal_inner_radius * ref
    outer = cfg.petal_outer_radius * ref
    frames = fi[rows]

    petals = []
    armed = mag[0] < inner
    start = None
    floor = 0  # no span may reach back past the previous petal
    for i in range(rows.size):
        above = mag[i] >= inner
        if start is None:
            if above and armed:
                start = i
            elif not above:
                armed = True
            continue
        if above:
            continue
        end = i - 1
        seg = mag[start:i]
        k = int(np.argmax(seg))
        if i - start >= cfg.petal_min_frames and seg[k] <= outer:
            lo = start
            while lo > floor and mag[lo - 1] < mag[lo]:
                lo -= 1
            hi = end
            while hi < rows.size - 1 and mag[hi + 1] < mag[hi]:
                hi += 1
            petals.append(Petal(int(frames[start]), int(frames[end]), int(frames[start + k]),
                                float(seg[k] / ref), int(frames[lo]), int(frames[hi])))
            floor = end
        start = None
    return petals, ref


def petal_span(petals) -> Optional[tuple]:
    if not petals:
        return None
    return petals[0].span_start, petals[-1].span_end


def count_half_twists(s: SymbolStream, takeoff_end: int, cfg: AnalyzerConfig,
                      stop: Optional[int] = None) -> int:
    petals, _ = find_petals(s, takeoff_end, cfg, stop)
    return len(petals)


# -- rotation type ------------------------------------------------------------

def takeoff_lean(s: SymbolStream, takeoff_end: int, cfg: AnalyzerConfig) -> float:
    """Signed horizontal lean (deg, + toward increasing x) over the last takeoff frames.

    Averages the unit pelvis->thorax and upper_neck->head_top directions.
    The lean points to the diver's front whether upright or in a handstand.
    """
    joints = ("pelvis", "thorax", "upper_neck", "head_top")
    ok = (s.frame_indices < takeoff_end) & s.usable(joints, cfg.min_confidence)
    rows = np.flatnonzero(ok)[-cfg.facing_window:]
    if rows.size == 0:
        raise NoUsablePose("no usable takeoff pose for facing detection")
    xy = s.pose_xy[rows]
    torso = to_math(xy[:, JOINT_INDEX["thorax"]] - xy[:, JOINT_INDEX["pelvis"]])
    head = to_math(xy[:, JOINT_INDEX["head_top"]] - xy[:, JOINT_INDEX["upper_neck"]])
    units = []
    for v in (torso, head):
        n = np.hypot(v[:, 0], v[:, 1])[:, None]
        units.append(np.divide(v, n, out=np.zeros_like(v), where=n > 0))
    total = units[0].sum(axis=0) + units[1].sum(axis=0)
    return float(np.degrees(np.arctan2(total[0], abs(total[1]))))


_ROTATION_TABLE = {
    # (facing the pool, rotating head-first toward the front)
    (True, True): RotationType.FORWARD,
    (True, False): RotationType.REVERSE,
    (False, True): RotationType.INWARD,
    (False, False): RotationType.BACKWARD,
}


def classify_rotation_type(s: SymbolStream, takeoff_end: int, armstand: bool, cfg: AnalyzerConfig,
                           first_increment: Optional[int] = None) -> RotationType:
    lean = takeoff_lean(s, takeoff_end, cfg)
    if abs(lean) < cfg.facing_deadband_deg:
        raise AmbiguousFacing(f"takeoff lean {lean:.1f} deg is inside the dead-band")
    front = 1 if lean > 0 else -1

    fi = s.frame_indices
    window = fi >= takeoff_end
    if first_increment is not None:
        window &= fi <= first_increment
    rows = np.flatnonzero(window & s.usable(("pelvis", "thorax"), cfg.min_confidence))
    if rows.size < 2:
        raise NoUsablePose("not enough post-takeoff poses to read the rotation direction")
    vec = to_math(s.pose_xy[rows, JOINT_INDEX["thorax"]] - s.pose_xy[rows, JOINT_INDEX["pelvis"]])
    turn = float(rotation_series(vec, check_aliasing=False)[-1])
    if turn == 0:
        raise AmbiguousRotation("no rotation observed after takeoff")
    # Upright, a front-first rotation turns the torso toward the front, which
    # is clockwise in the math frame when the front is +x; inverted flips it.
    chirality = front if not armstand else -front
    front_first = np.sign(turn) == -chirality
    facing_pool = front == s.platform.facing.sign
    return _ROTATION_TABLE[(facing_pool, bool(front_first))]


# -- position -----------------------------------------------------------------

def body_angles(s: SymbolStream, rows, cfg: AnalyzerConfig):
    """Per-frame hip and knee angles averaged over the usable sides (NaN if neither)."""
    xy = s.pose_xy[rows]
    conf = s.pose_conf[rows]
    hips, knees = [], []
    for side in ("r", "l"):
        sh, hp, kn, an = (JOINT_INDEX[f"{side}_{j}"] for j in ("shoulder", "hip", "knee", "ankle"))
        hip = joint_angles(xy[:, sh], xy[:, hp], xy[:, kn])
        knee = joint_angles(xy[:, hp], xy[:, kn], xy[:, an])
        hip_ok = np.all(conf[:, [sh, hp, kn]] >= cfg.min_confidence, axis=1)
        knee_ok = np.all(conf[:, [hp, kn, an]] >= cfg.min_confidence, axis=1)
        hips.append(np.where(hip_ok, hip, np.nan))
        knees.append(np.where(knee_ok, knee, np.nan))
    return _nanmean_rows(np.stack(hips)), _nanmean_rows(np.stack(knees))


def _nanmean_rows(a: np.ndarray) -> np.ndarray:
    n = np.count_nonzero(~np.isnan(a), axis=0)
    total = np.nansum(a, axis=0)
    return np.where(n > 0, total / np.maximum(n, 1), np.nan)


def classify_position(s: SymbolStream, somersault_range, cfg: AnalyzerConfig) -> Position:
    a, b = somersault_range
    quarter = (b - a) / 4.0
    fi = s.frame_indices
    rows = np.flatnonzero((fi >= a + quarter) & (fi <= b - quarter))
    if rows.size == 0:
        raise NoUsablePose("somersault range holds no frames")
    hip, knee = body_angles(s, rows, cfg)
    if np.all(np.isnan(hip)) or np.all(np.isnan(knee)):
        raise NoUsablePose("no usable hip/knee angles mid-somersault")
    hip = float(np.nanmedian(hip))
    knee = float(np.nanmedian(knee))
    if knee < cfg.position_knee_tuck_deg and hip < cfg.position_hip_tuck_deg:
        return Position.TUCK
    if hip < cfg.position_hip_pike_deg and knee >= cfg.position_straight_deg:
        return Position.PIKE
    if hip >= cfg.position_straight_deg and knee >= cfg.position_straight_deg:
        return Position.STRAIGHT
    return Position.FREE


# -- orchestration --------------------------------------------------------------

def recognize(s: SymbolStream, cfg: AnalyzerConfig) -> DiveDescriptor:
    t = detect_takeoff_end(s, cfg)
    entry_start, _ = detect_entry(s, cfg)
    armstand = detect_armstand(s, t, cfg)
    hits = somersault_increments(s, t, armstand, cfg)
    half_twists = count_half_twists(s, t, cfg, stop=entry_start)
    rotation = classify_rotation_type(s, t, armstand, cfg, hits[0] if hits else None)
    som_range = detect_somersault_range(s, t, entry_start, cfg)
    if som_range is None:
        raise NoUsablePose("no somersault rotation observed between takeoff and entry")
    position = classify_position(s, som_range, cfg)
    return DiveDescriptor(armstand, rotation, len(hits), half_twists, position)
