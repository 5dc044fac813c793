"""Kinematic synthetic dives with exact ground truth.

The body is a planar stick figure in the side view. Body orientation is the
angle of the pelvis->thorax axis; twisting only changes the projected
right-to-left hip vector, which is the body rotation applied to
``[L cos(twist), eps]`` in (front, up) body coordinates. Every joint on one
side of the body shares that side's hip offset, so sagittal joint angles are
unaffected by the twist.

Units: lengths in torso lengths (T) unless suffixed ``_px``; angles in
degrees; time in frames.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleScript
from .recognition import DiveDescriptor, Position, RotationType
from .symbols import (JOINT_INDEX, JOINTS, Facing, FrameSymbols, PlatformGeometry, Pose,
                      SplashObservation, SymbolStream)

# segment lengths (torso lengths)
NECK = 0.25
HEAD = 0.45
THIGH = 0.95
SHANK = 0.95
UPPER_ARM = 0.55
FOREARM = 0.5
HIP_EPS = 0.02

MAX_SOMERSAULT_RATE = 40.0  # deg/frame
MAX_TWIST_RATE = 24.0

_FRONT_FIRST = {RotationType.FORWARD: True, RotationType.INWARD: True,
                RotationType.BACKWARD: False, RotationType.REVERSE: False}
_FACING_POOL = {RotationType.FORWARD: True, RotationType.REVERSE: True,
                RotationType.INWARD: False, RotationType.BACKWARD: False}

_POSITION_SHAPE = {  # (hip, knee) held while somersaulting
    Position.STRAIGHT: (176.0, 176.0),
    Position.PIKE: (70.0, 175.0),
    Position.TUCK: (55.0, 55.0),
    Position.FREE: (140.0, 138.0),
}


@dataclass(frozen=True)
class DiveScript:
    """Everything needed to render one dive deterministically."""

    descriptor: DiveDescriptor
    fps: float = 60.0
    torso_px: float = 50.0
    hip_width_ratio: float = 0.65
    frame_size: tuple = (1920, 1080)
    facing: Facing = Facing.RIGHT
    edge_px: tuple = (500.0, 340.0)
    water_drop: float = 12.0
    jump_frame: int = 24
    water_contact_frame: int = 130     # target; the rendered contact may differ by a frame
    apex_height: float = 3.0           # pelvis above the edge at the top of the flight
    horizontal_speed: float = 2.5      # torso lengths per second
    stance_offset: float = 0.0         # leading foot past the edge while standing
    takeoff_lean_deg: float = 18.0
    head_tilt_deg: float = 10.0
    takeoff_hip_deg: float = 176.0
    takeoff_knee_deg: float = 176.0
    rotation_gap_frames: int = 5
    lineup_frames: int = 10
    ramp_frames: int = 3
    over_rotation_deg: float = 0.0
    position_hip_deg: float = None
    position_knee_deg: float = None
    twist_start_frac: float = 0.2
    twist_rate_deg: float = 18.0
    feet_apart_deg: float = 0.0
    entry_hip_deg: float = 178.0
    entry_knee_deg: float = 178.0
    splash_schedule: tuple = ((0, 4000.0), (1, 8000.0), (2, 6000.0), (3, 2500.0))
    noise_sigma: float = 0.0
    pose_dropout: float = 0.0

    def __post_init__(self):
        d = self.descriptor
        if d.half_somersaults < 1:
            raise InfeasibleScript("a dive needs at least one half somersault")
        if not 0 <= self.jump_frame < self.water_contact_frame:
            raise InfeasibleScript("jump_frame must precede water_contact_frame")
        if self.noise_sigma < 0 or not 0 <= self.pose_dropout < 1:
            raise InfeasibleScript("noise_sigma >= 0 and 0 <= pose_dropout < 1 required")
        if any(off < 0 or area < 0 for off, area in self.splash_schedule):
            raise InfeasibleScript("splash offsets and areas must be >= 0")

    @property
    def position_shape(self):
        hip, knee = _POSITION_SHAPE[self.descriptor.position]
        return (self.position_hip_deg if self.position_hip_deg is not None else hip,
                self.position_knee_deg if self.position_knee_deg is not None else knee)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["descriptor"] = self.descriptor.to_dict()
        out["facing"] = self.facing.value
        out["frame_size"] = list(self.frame_size)
        out["edge_px"] = list(self.edge_px)
        out["splash_schedule"] = [list(e) for e in self.splash_schedule]
        return out


@dataclass(frozen=True)
class GroundTruth:
    clip_id: str
    descriptor: DiveDescriptor
    phases: dict              # phase -> (first, last) or None
    jump_frame: int
    takeoff_end: int          # first frame past the takeoff threshold
    water_contact_frame: int  # first frame any joint reaches the water
    torso_px: float
    aspects: dict             # aspect id -> raw value on noise-free geometry
    script: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "clip_id": self.clip_id,
            "descriptor": self.descriptor.to_dict(),
            "phases": {k: None if v is None else list(v) for k, v in self.phases.items()},
            "jump_frame": self.jump_frame,
            "takeoff_end": self.takeoff_end,
            "water_contact_frame": self.water_contact_frame,
            "torso_px": self.torso_px,
            "aspects": dict(self.aspects),
            "script": self.script,
        }

    @classmethod
    def from_dict(cls, d) -> GroundTruth:
        return cls(
            clip_id=d["clip_id"],
            descriptor=DiveDescriptor.from_dict(d["descriptor"]),
            phases={k: None if v is None else (int(v[0]), int(v[1])) for k, v in d["phases"].items()},
            jump_frame=int(d["jump_frame"]),
            takeoff_end=int(d["takeoff_end"]),
            water_contact_frame=int(d["water_contact_frame"]),
            torso_px=float(d["torso_px"]),
            aspects=dict(d["aspects"]),
            script=d.get("script", {}),
        )


# -- body model -----------------------------------------------------------------

def _rot(v, deg):
    """Rotate (..., 2) vectors CCW by ``deg`` (broadcast over the leading axis)."""
    r = np.radians(deg)
    c, s = np.cos(r), np.sin(r)
    x, y = v[..., 0], v[..., 1]
    return np.stack([x * c - y * s, x * s + y * c], axis=-1)


def body_joints(phi, chirality, head_tilt, hip, knee, split, twist, hip_width, arms_up):
    """Joint offsets from the pelvis, math frame (y up), torso-length units.

    All angle arguments are per-frame arrays in degrees. ``chirality`` is +1
    when the diver's front is the clockwise perpendicular of the body axis.
    """
    phi = np.asarray(phi, dtype=float)
    n = phi.size
    rad = np.radians(phi)
    up = np.stack([-np.sin(rad), np.cos(rad)], axis=-1)
    front = chirality * np.stack([np.cos(rad), np.sin(rad)], axis=-1)
    c = chirality

    out = np.zeros((n, len(JOINTS), 2))
    thorax = up * 1.0
    neck = thorax + NECK * up
    head = neck + HEAD * _rot(up, -c * np.asarray(head_tilt))
    out[:, JOINT_INDEX["thorax"]] = thorax
    out[:, JOINT_INDEX["upper_neck"]] = neck
    out[:, JOINT_INDEX["head_top"]] = head

    hip_vec = (hip_width * np.cos(np.radians(twist)))[:, None] * front + HIP_EPS * up
    thigh = _rot(-up, c * (180.0 - np.asarray(hip)))
    arm_dir = up if arms_up else _rot(-up, -c * 8.0)
    for side, sign, splay in (("r", -0.5, -0.5), ("l", 0.5, 0.5)):
        off = sign * hip_vec
        t = _rot(thigh, splay * np.asarray(split))
        shank = _rot(t, -c * (180.0 - np.asarray(knee)))
        hip_j = off
        knee_j = hip_j + THIGH * t
        ankle_j = knee_j + SHANK * shank
        shoulder = thorax + off
        elbow = shoulder + UPPER_ARM * arm_dir
        wrist = elbow + FOREARM * arm_dir
        for name, val in (("hip", hip_j), ("knee", knee_j), ("ankle", ankle_j),
                          ("shoulder", shoulder), ("elbow", elbow), ("wrist", wrist)):
            out[:, JOINT_INDEX[f"{side}_{name}"]] = val
    return out


def _trapezoid_progress(tau, duration, ramp):
    """Fraction of a trapezoidal-rate motion completed after ``tau`` frames."""
    tau = np.clip(tau, 0.0, duration)
    ramp = min(ramp, duration / 2.0)
    if ramp <= 0:
        return tau / duration
    h = 1.0 / (duration - ramp)
    out = np.where(tau < ramp, h * tau ** 2 / (2 * ramp), h * (ramp / 2 + (tau - ramp)))
    tail = tau > duration - ramp
    out = np.where(tail, 1.0 - h * (duration - tau) ** 2 / (2 * ramp), out)
    return out


def _ramp(f, a, b, v0, v1):
    """Linear blend from v0 (f <= a) to v1 (f >= b)."""
    if b <= a:
        return np.where(f < b, v0, v1)
    w = np.clip((f - a) / (b - a), 0.0, 1.0)
    return v0 + (v1 - v0) * w


@dataclass
class _Render:
    rel: np.ndarray       # (n, 16, 2) math-frame offsets from the pelvis (T)
    pelvis: np.ndarray    # (n, 2) math-frame pelvis position relative to the edge (T)
    phi: np.ndarray
    twist: np.ndarray
    c: int                # takeoff threshold crossing
    r0: int
    re: int
    t0: int
    t1: float


def _render(script: DiveScript, n_frames: int, threshold: float) -> _Render:
    d = script.descriptor
    p = script.facing.sign
    facing_pool = _FACING_POOL[d.rotation_type]
    front_x = p if facing_pool else -p
    chirality = -front_x if d.armstand else front_x
    rot_sign = -chirality if _FRONT_FIRST[d.rotation_type] else chirality
    phi0 = 180.0 if d.armstand else 0.0
    f = np.arange(n_frames, dtype=float)
    j0 = script.jump_frame
    arms_up = d.armstand

    def pose(phi, lean_w, hip, knee, split, twist):
        lean = -chirality * script.takeoff_lean_deg * lean_w
        return body_joints(phi + lean, chirality, script.head_tilt_deg * lean_w, hip, knee,
                           split, twist, script.hip_width_ratio, arms_up)

    one = np.ones(1)
    stand = pose(np.full(1, phi0), one, script.takeoff_hip_deg * one, script.takeoff_knee_deg * one,
                 0 * one, 90 * one)[0]
    split_pose = pose(np.full(1, phi0), one, script.takeoff_hip_deg * one, script.takeoff_knee_deg * one,
                      script.feet_apart_deg * one, 90 * one)[0]
    ankles = [JOINT_INDEX["r_ankle"], JOINT_INDEX["l_ankle"]]
    support = [JOINT_INDEX["r_wrist"], JOINT_INDEX["l_wrist"]] if d.armstand else ankles
    hs = -float(stand[support, 1].min())
    contacts = ankles + support
    x0 = script.stance_offset - float((stand[contacts, 0] * p).max())

    # entry pose fixes how far the leading joint reaches below the pelvis
    phi_end = phi0 + rot_sign * (d.half_somersaults * 180.0 + script.over_rotation_deg)
    entry = body_joints(np.full(1, phi_end), chirality, 0 * one, script.entry_hip_deg * one,
                        script.entry_knee_deg * one, script.feet_apart_deg * one, 90 * one,
                        script.hip_width_ratio, arms_up)[0]
    reach = -float(entry[:, 1].min())
    zc = -(script.water_drop - reach)
    tc = (script.water_contact_frame - j0) / script.fps
    a = max(script.apex_height - hs, 0.0)
    if hs - zc <= 0:
        raise InfeasibleScript("water is not below the standing diver")
    q = (math.sqrt(2 * a) + math.sqrt(2 * a + 2 * (hs - zc))) / tc
    g = q * q
    vy = math.sqrt(2 * g * a)

    t = np.maximum(f - j0, 0.0) / script.fps
    px = (x0 + script.horizontal_speed * t) * p
    pz = hs + vy * t - 0.5 * g * t ** 2
    pelvis = np.stack([px, pz], axis=-1)

    # takeoff crossing with the takeoff posture (held until the rotation starts)
    dist = np.where(f >= j0, px * p + (split_pose[ankles, 0] * p).min(), x0 + (stand[ankles, 0] * p).min())
    beyond = np.flatnonzero(dist > threshold)
    if beyond.size == 0:
        raise InfeasibleScript("the diver never clears the takeoff threshold")
    c = int(beyond[0])
    r0 = c + script.rotation_gap_frames
    re = script.water_contact_frame - script.lineup_frames
    duration = re - r0
    total = d.half_somersaults * 180.0 + script.over_rotation_deg
    if duration < max(2 * script.ramp_frames + 2, 8):
        raise InfeasibleScript("no time left to somersault between takeoff and line-up")
    peak_rate = total / (duration - min(script.ramp_frames, duration / 2))
    if peak_rate > MAX_SOMERSAULT_RATE:
        raise InfeasibleScript(f"somersault rate {peak_rate:.1f} deg/frame is too fast to sample")

    progress = _trapezoid_progress(f - r0, duration, script.ramp_frames)
    rotation = d.half_somersaults * 180.0 * progress + script.over_rotation_deg * progress
    phi = phi0 + rot_sign * rotation
    lean_w = np.clip(1.0 - (f - r0) / duration, 0.0, 1.0)

    ph, pk = script.position_shape
    ramp = script.ramp_frames
    # the position is taken between leaving the platform and starting to rotate,
    # and released during the line-up, so it holds for the whole somersault
    tuck_from = min(c + 2, r0)
    hip = _ramp(f, tuck_from, r0, script.takeoff_hip_deg, ph)
    hip = np.where(f > re, _ramp(f, re, re + ramp, ph, script.entry_hip_deg), hip)
    knee = _ramp(f, tuck_from, r0, script.takeoff_knee_deg, pk)
    knee = np.where(f > re, _ramp(f, re, re + ramp, pk, script.entry_knee_deg), knee)
    split = np.where(f >= j0, script.feet_apart_deg, 0.0)

    n_tw = d.half_twists
    t0 = int(round(r0 + script.twist_start_frac * duration))
    t1 = float(t0)
    twist = np.full(n_frames, 90.0)
    if n_tw:
        if script.twist_rate_deg > MAX_TWIST_RATE or script.twist_rate_deg <= 0:
            raise InfeasibleScript("twist rate out of range")
        t1 = t0 + n_tw * 180.0 / script.twist_rate_deg
        if t1 > re:
            raise InfeasibleScript("twist does not finish before the line-up")
        twist = 90.0 + np.clip((f - t0) * script.twist_rate_deg, 0.0, n_tw * 180.0)

    lean_w = np.where(f < r0, 1.0, lean_w)
    rel = pose(phi, lean_w, hip, knee, split, twist)
    return _Render(rel, pelvis, phi, twist, c, r0, re, t0, t1)


def _to_image(script: DiveScript, render: _Render) -> np.ndarray:
    pts = render.pelvis[:, None, :] + render.rel
    ex, ey = script.edge_px
    out = np.empty_like(pts)
    out[..., 0] = ex + script.torso_px * pts[..., 0]
    out[..., 1] = ey - script.torso_px * pts[..., 1]
    return out


# -- ground-truth metrics on clean geometry ---------------------------------------

def _ang(u, v):
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    dot = (u * v).sum(axis=-1)
    return np.degrees(np.arctan2(np.abs(cross), dot))


def _side_angles(xy):
    J = JOINT_INDEX
    hips, knees = [], []
    for s in "rl":
        sh, hp, kn, an = (xy[:, J[f"{s}_{j}"]] for j in ("shoulder", "hip", "knee", "ankle"))
        hips.append(_ang(sh - hp, kn - hp))
        knees.append(_ang(hp - kn, an - kn))
    return np.mean(hips, axis=0), np.mean(knees, axis=0)


def _truth_aspects(script, xy, phases, contact, torso, visible, splash_areas) -> dict:
    J = JOINT_INDEX
    p = script.facing.sign
    ex, ey = script.edge_px
    t_end = phases["takeoff"][1] + 1
    e0 = phases["entry"][0]
    flight = np.arange(t_end, e0)
    hip, knee = _side_angles(xy)
    out = {}
    pel = xy[:, J["pelvis"]]
    ra, la = xy[:, J["r_ankle"]] - pel, xy[:, J["l_ankle"]] - pel
    out["feet_apart"] = float(_ang(ra[flight], la[flight]).mean())
    after = np.arange(t_end, e0 + 1)
    out["height_off_platform"] = float(((ey - pel[after, 1]) / torso).max())
    below = xy[flight, :, 1] > ey
    out["distance_from_platform"] = float(np.where(below, (xy[flight, :, 0] - ex) * p / torso, np.inf).min())
    s0, s1 = phases["somersault"]
    som = np.arange(s0, s1 + 1)
    if script.descriptor.position is Position.TUCK:
        out["somersault_tightness"] = float(((hip[som] + knee[som]) / 2).mean())
    else:
        out["somersault_tightness"] = float(hip[som].mean())
    out["knee_straightness"] = float((180.0 - knee[flight]).mean())
    if phases["twist"] is not None:
        tw = np.arange(phases["twist"][0], phases["twist"][1] + 1)
        out["twist_tightness"] = float(((180.0 - hip[tw]) + (180.0 - knee[tw])).mean())
    line = xy[contact - 1, J["head_top"]] - 0.5 * (xy[contact - 1, J["r_ankle"]] + xy[contact - 1, J["l_ankle"]])
    a = float(_ang(line[None, :], np.array([[0.0, 1.0]]))[0])
    out["verticalness"] = min(a, 180.0 - a)
    need = [J[f"{s}_{j}"] for s in "rl" for j in ("shoulder", "hip", "knee", "ankle")]
    ok = [i for i in range(e0 + 1) if visible[i, need].all()][-5:]
    out["entry_straightness"] = float(((180.0 - hip[ok]) + (180.0 - knee[ok])).mean())
    out["splash_size"] = float(max(splash_areas, default=0.0) / (script.frame_size[0] * script.frame_size[1]))
    return out


# -- public API -------------------------------------------------------------------

def generate(script: DiveScript, seed: int, clip_id: str = None, threshold: float = 0.5):
    """Render ``script`` into ``(SymbolStream, GroundTruth)``; deterministic in (script, seed)."""
    clip_id = clip_id or f"synth-{seed}"
    horizon = script.water_contact_frame + 40
    render = _render(script, horizon, threshold)
    clean = _to_image(script, render)
    water_y = script.edge_px[1] + script.water_drop * script.torso_px
    wet = clean[..., 1] >= water_y
    touched = np.flatnonzero(wet.any(axis=1))
    if touched.size == 0:
        raise InfeasibleScript("diver never reaches the water")
    contact = int(touched[0])
    if contact <= render.re:
        raise InfeasibleScript("water reached before the line-up finished")

    splash = {}
    for off, area in script.splash_schedule:
        if area > 0:
            splash[contact + int(off)] = float(area)
    last = max(splash) if splash else contact + 15
    n = last + 1
    if n > horizon:
        render = _render(script, n, threshold)
        clean = _to_image(script, render)
        wet = clean[..., 1] >= water_y
    clean, wet = clean[:n], wet[:n]
    visible = ~wet

    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, script.noise_sigma, size=clean.shape) if script.noise_sigma else np.zeros_like(clean)
    conf = rng.uniform(0.6, 1.0, size=clean.shape[:2])
    drop = rng.random(n) < script.pose_dropout
    noisy = clean + noise
    conf = np.where(visible, conf, 0.0)

    width, height = script.frame_size
    frames = []
    for i in range(n):
        pose = None
        if not drop[i] and visible[i].any():
            pose = Pose.from_array(noisy[i], conf[i])
        sp = None
        if i in splash:
            area = splash[i]
            w = min(math.sqrt(2.0 * area), width)
            h = min(area / w, height)
            cx = float(np.clip(clean[contact, JOINT_INDEX["pelvis"], 0], w / 2, width - w / 2))
            y = float(np.clip(water_y - h, 0.0, height - h))
            sp = SplashObservation(area, (cx - w / 2, y, w, h))
        frames.append(FrameSymbols(i, pose, sp))
    platform = PlatformGeometry(float(script.edge_px[0]), float(script.edge_px[1]), script.facing, float(water_y))
    stream = SymbolStream(clip_id, float(script.fps), tuple(script.frame_size), platform, tuple(frames))

    torso = script.torso_px
    pel_y = clean[:, JOINT_INDEX["pelvis"], 1]
    near = np.flatnonzero(pel_y >= water_y - torso)
    starts = ([int(near[0])] if near.size else []) + ([min(splash)] if splash else [])
    entry_start = min(starts) if starts else contact
    phases = {
        "takeoff": (0, render.c - 1),
        "twist": (render.t0, int(math.ceil(render.t1))) if script.descriptor.half_twists else None,
        "somersault": (render.r0, render.re),
        "entry": (entry_start, n - 1),
    }
    aspects = _truth_aspects(script, clean, phases, contact, torso, visible, list(splash.values()))
    truth = GroundTruth(clip_id, script.descriptor, phases, script.jump_frame, render.c, contact,
                        float(torso), aspects, script.to_dict())
    return stream, truth


def clean_rotation(script: DiveScript, seed: int = 0) -> float:
    """Accumulated pelvis->thorax rotation after takeoff at zero noise (deg, unsigned)."""
    from .kinematics import accumulate_rotation

    stream, truth = generate(dataclasses.replace(script, noise_sigma=0.0, pose_dropout=0.0), seed)
    vec = []
    for fr in stream.frames[truth.takeoff_end:]:
        if fr.pose is None or fr.pose["thorax"][2] == 0 or fr.pose["pelvis"][2] == 0:
            continue
        (tx, ty), (px, py) = fr.pose.xy("thorax"), fr.pose.xy("pelvis")
        vec.append((tx - px, py - ty))
    return abs(accumulate_rotation(vec))


def random_script(rng: np.random.Generator, noise_sigma=0.0, pose_dropout=0.0) -> DiveScript:
    """Draw a feasible script covering the descriptor space."""
    for _ in range(100):
        armstand = bool(rng.random() < 0.2)
        rotation = RotationType(rng.choice([r.value for r in RotationType]))
        half_ss = int(rng.integers(1, 10))
        half_tw = 0 if rng.random() < 0.5 else int(rng.integers(1, 9))
        if half_tw:
            position = Position(rng.choice(["free", "straight", "pike"]))
        else:
            position = Position(rng.choice(["straight", "pike", "tuck"]))
        desc = DiveDescriptor(armstand, rotation, half_ss, half_tw, position)
        shape = {
            Position.STRAIGHT: (rng.uniform(170, 180), rng.uniform(170, 180)),
            Position.PIKE: (rng.uniform(45, 95), rng.uniform(168, 180)),
            Position.TUCK: (rng.uniform(35, 85), rng.uniform(35, 85)),
            Position.FREE: (rng.uniform(125, 150), rng.uniform(120, 150)),
        }[position]
        facing = Facing.RIGHT if rng.random() < 0.5 else Facing.LEFT
        torso = float(rng.uniform(45, 60))
        edge_y = float(rng.uniform(330, 380))
        drop = float(min(rng.uniform(10, 12.5), (1040 - edge_y) / torso))
        edge_x = float(rng.uniform(350, 600)) if facing is Facing.RIGHT else float(rng.uniform(1320, 1570))
        jump = int(rng.integers(15, 31))
        flight = int(rng.integers(95, 121))
        splash_len = int(rng.integers(15, 36))
        peak = float(rng.uniform(300, 30000))
        schedule = tuple((i, round(peak * math.sin(math.pi * (i + 1) / (splash_len + 1)), 3))
                         for i in range(splash_len))
        script = DiveScript(
            descriptor=desc,
            torso_px=torso,
            hip_width_ratio=float(rng.uniform(0.6, 0.75)),
            facing=facing,
            edge_px=(edge_x, edge_y),
            water_drop=drop,
            jump_frame=jump,
            water_contact_frame=jump + flight,
            apex_height=float(rng.uniform(3.1, 4.6) if not armstand else rng.uniform(2.3, 2.9)),
            horizontal_speed=float(rng.uniform(1.5, 3.5)),
            stance_offset=float(rng.uniform(-0.1, 0.15)),
            takeoff_lean_deg=float(rng.uniform(12, 25)),
            head_tilt_deg=float(rng.uniform(5, 15)),
            takeoff_hip_deg=float(rng.uniform(170, 180)),
            takeoff_knee_deg=float(rng.uniform(170, 180)),
            rotation_gap_frames=int(rng.integers(4, 7)),
            lineup_frames=int(rng.integers(8, 15)),
            over_rotation_deg=float(rng.uniform(-15, 15)),
            position_hip_deg=float(shape[0]),
            position_knee_deg=float(shape[1]),
            twist_start_frac=float(rng.uniform(0.05, 0.3)),
            twist_rate_deg=float(rng.uniform(12, 20)),
            feet_apart_deg=float(rng.uniform(0, 12)),
            entry_hip_deg=float(rng.uniform(165, 180)),
            entry_knee_deg=float(rng.uniform(168, 180)),
            splash_schedule=schedule,
            noise_sigma=noise_sigma,
            pose_dropout=pose_dropout,
        )
        script = _fit_twist(script)
        try:
            _render(script, script.water_contact_frame + 40, 0.5)
        except InfeasibleScript:
            continue
        return script
    raise InfeasibleScript("could not draw a feasible script")


def _fit_twist(script: DiveScript) -> DiveScript:
    """Speed up / start the twist earlier so it finishes before the line-up."""
    n = script.descriptor.half_twists
    if not n:
        return script
    est_c = script.jump_frame + 20
    r0 = est_c + script.rotation_gap_frames
    re = script.water_contact_frame - script.lineup_frames
    room = (re - 1) - (r0 + script.twist_start_frac * (re - r0))
    need = n * 180.0 / script.twist_rate_deg
    if need <= room:
        return script
    rate = min(MAX_TWIST_RATE, n * 180.0 / max(room, 1.0))
    start = script.twist_start_frac
    if n * 180.0 / rate > room:
        start = 0.02
    return dataclasses.replace(script, twist_rate_deg=rate, twist_start_frac=start)


def sample_corpus(n: int, seed: int, noise_sigma=0.0, pose_dropout=0.0):
    """``n`` (stream, truth) pairs drawn over the descriptor space; deterministic in seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        script = random_script(rng, noise_sigma, pose_dropout)
        stream_seed = int(rng.integers(0, 2 ** 31 - 1))
        out.append(generate(script, stream_seed, clip_id=f"synth-{seed}-{i:05d}"))
    return out


def forward_twister_script(**overrides) -> DiveScript:
    """Forward 2.5 somersaults with 3 twists in the free position."""
    base = dict(descriptor=DiveDescriptor(False, RotationType.FORWARD, 5, 6, Position.FREE),
                water_contact_frame=135, twist_rate_deg=16.0, twist_start_frac=0.1)
    base.update(overrides)
    return DiveScript(**base)


def forward_pike_script(**overrides) -> DiveScript:
    """Forward 3.5 somersaults in pike, no twists."""
    base = dict(descriptor=DiveDescriptor(False, RotationType.FORWARD, 7, 0, Position.PIKE),
                water_contact_frame=135, position_hip_deg=70.0, position_knee_deg=175.0)
    base.update(overrides)
    return DiveScript(**base)
