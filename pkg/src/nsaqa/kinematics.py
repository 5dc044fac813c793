"""2D vector geometry shared by the rules.

Rules compare directions against "up" and "down", so image coordinates
(y down) are converted to a math frame (y up) in exactly one place:
:func:`to_math`. Signed rotations are counterclockwise-positive in that frame.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import AliasingSuspected, DegenerateJoint, NoUsablePose, ZeroVector
from .symbols import JOINT_INDEX

VERTICAL_UP = (0.0, 1.0)
VERTICAL_DOWN = (0.0, -1.0)

ALIASING_STEP_DEG = 150.0


def to_math(v):
    """Image-frame vector(s) -> math frame. Works on tuples and (..., 2) arrays."""
    if isinstance(v, np.ndarray):
        out = v.astype(float, copy=True)
        out[..., 1] *= -1.0
        return out
    return (v[0], -v[1])


def angle_between(v1, v2) -> float:
    """Unsigned angle in degrees, in [0, 180]."""
    x1, y1 = v1
    x2, y2 = v2
    if (x1 == 0 and y1 == 0) or (x2 == 0 and y2 == 0):
        raise ZeroVector("angle_between needs nonzero vectors")
    cross = x1 * y2 - y1 * x2
    dot = x1 * x2 + y1 * y2
    return math.degrees(math.atan2(abs(cross), dot))


def angles_between(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Vectorized :func:`angle_between`; zero-length rows give NaN."""
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    cross = v1[..., 0] * v2[..., 1] - v1[..., 1] * v2[..., 0]
    dot = v1[..., 0] * v2[..., 0] + v1[..., 1] * v2[..., 1]
    out = np.degrees(np.arctan2(np.abs(cross), dot))
    zero = (np.hypot(v1[..., 0], v1[..., 1]) == 0) | (np.hypot(v2[..., 0], v2[..., 1]) == 0)
    return np.where(zero, np.nan, out)


def joint_angle(a, b, c) -> float:
    """Interior angle at ``b`` between rays b->a and b->c, degrees."""
    u = (a[0] - b[0], a[1] - b[1])
    w = (c[0] - b[0], c[1] - b[1])
    if u == (0, 0) or w == (0, 0):
        raise DegenerateJoint("joint point coincides with a neighbour")
    return angle_between(u, w)


def joint_angles(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return angles_between(np.asarray(a) - np.asarray(b), np.asarray(c) - np.asarray(b))


def rotation_steps(vectors) -> np.ndarray:
    """Minimal signed angle (deg) between consecutive vectors."""
    v = np.asarray(vectors, dtype=float).reshape(-1, 2)
    if np.any(np.hypot(v[:, 0], v[:, 1]) == 0):
        raise ZeroVector("rotation tracking needs nonzero vectors")
    a, b = v[:-1], v[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    return np.degrees(np.arctan2(cross, dot))


def rotation_series(vectors, check_aliasing=True) -> np.ndarray:
    """Cumulative signed rotation after each vector (first entry 0)."""
    steps = rotation_steps(vectors)
    if check_aliasing and steps.size and np.max(np.abs(steps)) >= ALIASING_STEP_DEG:
        i = int(np.argmax(np.abs(steps)))
        raise AliasingSuspected(f"step {i} rotates {steps[i]:.1f} deg; sampling too coarse")
    return np.concatenate([[0.0], np.cumsum(steps)])


def accumulate_rotation(vectors) -> float:
    """Total signed rotation (deg, CCW positive) of a vector sequence."""
    series = rotation_series(vectors)
    return float(series[-1])


def torso_length_reference(s, min_confidence: float = 0.1) -> float:
    """Median pelvis-thorax distance in pixels: the body-scale unit."""
    ok = s.usable(("pelvis", "thorax"), min_confidence)
    if not ok.any():
        raise NoUsablePose("no frame with both pelvis and thorax")
    d = s.pose_xy[ok, JOINT_INDEX["thorax"]] - s.pose_xy[ok, JOINT_INDEX["pelvis"]]
    lengths = np.hypot(d[:, 0], d[:, 1])
    ref = float(np.median(lengths))
    if ref <= 0:
        raise NoUsablePose("torso length is zero")
    return ref
