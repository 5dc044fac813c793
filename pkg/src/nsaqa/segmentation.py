"""Temporal phases of a dive: takeoff, twist, somersault, entry.

Ranges are inclusive ``(first_frame, last_frame)`` pairs in frame-index units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import AnalyzerConfig
from .errors import NeverLeavesPlatform, NoEntryDetected, NoUsablePose, TakeoffNotObserved
from .kinematics import rotation_series, to_math, torso_length_reference
from .symbols import JOINT_INDEX, SymbolStream

PHASES = ("takeoff", "twist", "somersault", "entry")


@dataclass(frozen=True)
class PhaseSegmentation:
    takeoff: tuple
    entry: tuple
    twist: Optional[tuple] = None
    somersault: Optional[tuple] = None

    def get(self, phase) -> Optional[tuple]:
        return getattr(self, phase)

    def to_dict(self) -> dict:
        return {p: None if self.get(p) is None else list(self.get(p)) for p in PHASES}

    @classmethod
    def from_dict(cls, d) -> PhaseSegmentation:
        def rng(v):
            return None if v is None else (int(v[0]), int(v[1]))
        return cls(takeoff=rng(d["takeoff"]), entry=rng(d["entry"]),
                   twist=rng(d.get("twist")), somersault=rng(d.get("somersault")))

    @property
    def flight(self) -> tuple:
        """Frames strictly between takeoff and entry."""
        return self.takeoff[1] + 1, self.entry[0] - 1


def detect_takeoff_end(s: SymbolStream, cfg: AnalyzerConfig) -> int:
    """First frame whose nearest ankle is past the edge by the threshold distance."""
    torso = torso_length_reference(s, cfg.min_confidence)
    p = s.platform
    xs = s.pose_xy[:, [JOINT_INDEX["r_ankle"], JOINT_INDEX["l_ankle"]], 0]
    conf = s.pose_conf[:, [JOINT_INDEX["r_ankle"], JOINT_INDEX["l_ankle"]]]
    dist = (xs - p.edge_x) * p.facing.sign / torso
    dist = np.where(conf >= cfg.min_confidence, dist, np.inf)
    nearest = dist.min(axis=1)
    seen = np.isfinite(nearest)
    if not seen.any():
        raise NoUsablePose("no frame shows an ankle")
    beyond = np.flatnonzero(seen & (nearest > cfg.takeoff_distance_threshold))
    if beyond.size == 0:
        raise NeverLeavesPlatform(
            f"NeverLeavesPlatform: no ankle gets {cfg.takeoff_distance_threshold} torso lengths past the edge")
    pos = int(beyond[0])
    if pos == 0:
        raise TakeoffNotObserved("diver is already past the platform edge in the first frame")
    return int(s.frame_indices[pos])


def detect_entry(s: SymbolStream, cfg: Optional[AnalyzerConfig] = None) -> tuple:
    """Entry starts when the pelvis nears the water or a splash appears, whichever is first."""
    cfg = cfg or AnalyzerConfig()
    candidates = []
    try:
        torso = torso_length_reference(s, cfg.min_confidence)
    except NoUsablePose:
        torso = None
    if torso is not None:
        pi = JOINT_INDEX["pelvis"]
        ok = s.pose_conf[:, pi] >= cfg.min_confidence
        near = ok & (s.pose_xy[:, pi, 1] >= s.platform.water_y - torso)
        hits = np.flatnonzero(near)
        if hits.size:
            candidates.append(int(s.frame_indices[hits[0]]))
    splash = np.flatnonzero(~np.isnan(s.splash_area))
    if splash.size:
        candidates.append(int(s.frame_indices[splash[0]]))
    if not candidates:
        raise NoEntryDetected("diver never approaches the water and no splash is observed")
    start = min(candidates)
    end = max(start, s.last_symbol_frame())
    return start, end


def detect_somersault_range(s: SymbolStream, takeoff_end: int, entry_start: int,
                            cfg: AnalyzerConfig) -> Optional[tuple]:
    """Frames over which the torso vector turns from its rest to its final orientation.

    Onset is the frame before the accumulated rotation first exceeds
    ``som_onset_deg``; offset is the first frame within ``som_onset_deg`` of
    the final accumulated rotation.
    """
    fi = s.frame_indices
    window = (fi >= takeoff_end) & (fi < entry_start)
    ok = window & s.usable(("pelvis", "thorax"), cfg.min_confidence)
    rows = np.flatnonzero(ok)
    if rows.size < 3:
        return None
    vec = to_math(s.pose_xy[rows, JOINT_INDEX["thorax"]] - s.pose_xy[rows, JOINT_INDEX["pelvis"]])
    if np.any(np.hypot(vec[:, 0], vec[:, 1]) == 0):
        return None
    acc = rotation_series(vec, check_aliasing=False)
    # median of three damps single-frame pose jitter
    smooth = acc.copy()
    smooth[1:-1] = np.median(np.stack([acc[:-2], acc[1:-1], acc[2:]]), axis=0)
    tail = smooth[-3:]
    final = float(np.median(tail))
    if abs(final) < 2 * cfg.som_onset_deg:
        return None
    b = smooth * np.sign(final)
    final = abs(final)
    over = np.flatnonzero(b > cfg.som_onset_deg)
    start_i = max(int(over[0]) - 1, 0)
    done = np.flatnonzero(b >= final - cfg.som_onset_deg)
    done = done[done > start_i]
    end_i = int(done[0]) if done.size else rows.size - 1
    return int(fi[rows[start_i]]), int(fi[rows[end_i]])


def _clip(rng, lo, hi):
    if rng is None:
        return None
    a, b = max(rng[0], lo), min(rng[1], hi)
    return (a, b) if a <= b else None


def segment(s: SymbolStream, d, cfg: AnalyzerConfig) -> PhaseSegmentation:
    """Split a recognized dive into its phases."""
    from .recognition import find_petals, petal_span

    t = detect_takeoff_end(s, cfg)
    entry = detect_entry(s, cfg)
    if entry[0] <= t:
        raise NoEntryDetected(f"entry at frame {entry[0]} does not follow takeoff end {t}")
    takeoff = (int(s.frame_indices[0]), int(s.frame_indices[s.position_of(t) - 1]))
    lo, hi = t, entry[0] - 1

    somersault = None
    if d.half_somersaults > 0:
        somersault = _clip(detect_somersault_range(s, t, entry[0], cfg), lo, hi)
    twist = None
    if d.half_twists > 0:
        petals, _ = find_petals(s, t, cfg, stop=entry[0])
        twist = _clip(petal_span(petals), lo, hi)
    return PhaseSegmentation(takeoff=takeoff, entry=entry, twist=twist, somersault=somersault)
