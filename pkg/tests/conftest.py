import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nsaqa.symbols import (JOINTS, Facing, FrameSymbols, PlatformGeometry, Pose, SplashObservation,
                           SymbolStream)
from nsaqa.synth import sample_corpus

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_pose(points=None, conf=1.0, base=(100.0, 100.0)):
    """Pose with the given joints; unspecified joints sit near ``base``."""
    points = points or {}
    coords = []
    for i, name in enumerate(JOINTS):
        x, y = points.get(name, (base[0] + i, base[1] + 0.5 * i))
        coords.append((float(x), float(y), float(conf)))
    return Pose(tuple(coords))


def make_stream(poses, splashes=None, clip_id="fixture", facing=Facing.RIGHT, edge=(200.0, 300.0),
                water_y=900.0, size=(1280, 720 * 2), fps=30.0):
    splashes = splashes or {}
    frames = tuple(FrameSymbols(i, p, splashes.get(i)) for i, p in enumerate(poses))
    return SymbolStream(clip_id, fps, size, PlatformGeometry(edge[0], edge[1], facing, water_y), frames)


def torso_pose(vec_math, pelvis=(500.0, 400.0), length=50.0, conf=1.0):
    """Pose whose pelvis->thorax direction is ``vec_math`` (y up)."""
    v = np.asarray(vec_math, dtype=float)
    v = v / np.hypot(*v) * length
    px, py = pelvis
    return make_pose({"pelvis": (px, py), "thorax": (px + v[0], py - v[1])}, conf=conf)


def body_pose(hip_deg, knee_deg, origin=(400.0, 300.0), length=50.0):
    """Upright side-view pose with the given interior hip and knee angles (image frame)."""
    hx, hy = origin
    h = math.radians(hip_deg)
    thigh = np.array([math.sin(h), -math.cos(h)])
    knee = np.array([hx, hy]) + length * thigh
    back = -thigh
    k = math.radians(knee_deg)
    shin = np.array([back[0] * math.cos(k) - back[1] * math.sin(k),
                     back[0] * math.sin(k) + back[1] * math.cos(k)])
    ankle = knee + length * shin
    pts = {"pelvis": (hx, hy), "thorax": (hx, hy - length)}
    for side in ("r", "l"):
        pts.update({f"{side}_shoulder": (hx, hy - length), f"{side}_hip": (hx, hy),
                    f"{side}_knee": tuple(knee), f"{side}_ankle": tuple(ankle)})
    return make_pose(pts)


# -- shared corpora ---------------------------------------------------------------

@pytest.fixture(scope="session")
def clean_corpus():
    return sample_corpus(200, 101)


@pytest.fixture(scope="session")
def noisy_corpus():
    return sample_corpus(200, 202, noise_sigma=2.0, pose_dropout=0.02)


# -- acceptance summary -------------------------------------------------------------

ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    key = marker.args
    ACCEPTANCE[key] = ACCEPTANCE.get(key, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}")
