"""Aspect microprograms, aspect selection, percentile scoring and aggregation.

Each microprogram maps ``(stream, segmentation, descriptor, config)`` to a
:class:`RawMetric`. Raw values are angles in degrees, distances in torso
lengths, or areas as a fraction of the frame, so every metric is invariant to
uniform image scaling.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .config import AnalyzerConfig
from .errors import (AllZeroWeights, AnalysisError, EmptyCorpus, InvariantViolation, MalformedDocument,
                     NoApplicableAspects, NoUsablePose, PhaseAbsent, SchemaViolation, UnknownAspect)
from .kinematics import angles_between, to_math, torso_length_reference
from .recognition import DiveDescriptor, Position, body_angles, recognize
from .segmentation import PhaseSegmentation, segment
from .symbols import JOINT_INDEX, SymbolStream, interpolate_poses


class AspectId(str, Enum):
    FEET_APART = "feet_apart"
    HEIGHT_OFF_PLATFORM = "height_off_platform"
    DISTANCE_FROM_PLATFORM = "distance_from_platform"
    SOMERSAULT_TIGHTNESS = "somersault_tightness"
    KNEE_STRAIGHTNESS = "knee_straightness"
    TWIST_TIGHTNESS = "twist_tightness"
    VERTICALNESS = "verticalness"
    ENTRY_STRAIGHTNESS = "entry_straightness"
    SPLASH_SIZE = "splash_size"


class Polarity(str, Enum):
    LOWER = "lower_is_better"
    HIGHER = "higher_is_better"
    BAND = "band_is_better"


ASPECTS = tuple(AspectId)

UNITS = {
    AspectId.FEET_APART: "deg",
    AspectId.HEIGHT_OFF_PLATFORM: "torso_lengths",
    AspectId.DISTANCE_FROM_PLATFORM: "torso_lengths",
    AspectId.SOMERSAULT_TIGHTNESS: "deg",
    AspectId.KNEE_STRAIGHTNESS: "deg",
    AspectId.TWIST_TIGHTNESS: "deg",
    AspectId.VERTICALNESS: "deg",
    AspectId.ENTRY_STRAIGHTNESS: "deg",
    AspectId.SPLASH_SIZE: "frame_fraction",
}

POLARITY = {a: Polarity.LOWER for a in AspectId}
POLARITY[AspectId.HEIGHT_OFF_PLATFORM] = Polarity.HIGHER
POLARITY[AspectId.DISTANCE_FROM_PLATFORM] = Polarity.BAND

EVIDENCE_TOP = 3


def aspect_id(name) -> AspectId:
    try:
        return AspectId(name)
    except ValueError:
        raise UnknownAspect(f"unknown aspect {name!r}") from None


@dataclass(frozen=True)
class RawMetric:
    aspect: AspectId
    value: float
    evidence: tuple = ()  # (frame_index, severity) pairs, most severe first
    category: Optional[str] = None

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise NoUsablePose(f"{self.aspect.value}: metric is not finite")

    @property
    def unit(self) -> str:
        return UNITS[self.aspect]

    @property
    def polarity(self) -> Polarity:
        return POLARITY[self.aspect]

    @property
    def evidence_frames(self) -> list:
        return [f for f, _ in self.evidence]

    def to_dict(self) -> dict:
        return {"aspect": self.aspect.value, "value": self.value, "unit": self.unit,
                "polarity": self.polarity.value,
                "evidence": [{"frame": f, "severity": v} for f, v in self.evidence],
                "category": self.category}


@dataclass(frozen=True)
class AspectScore:
    aspect: AspectId
    applicable: bool
    raw: Optional[RawMetric] = None
    percentile: Optional[float] = None
    display: Optional[float] = None

    @property
    def category_label(self) -> Optional[str]:
        return self.raw.category if self.raw is not None else None

    def to_dict(self) -> dict:
        return {"aspect": self.aspect.value, "applicable": self.applicable,
                "raw": None if self.raw is None else self.raw.to_dict(),
                "percentile": self.percentile, "display": self.display,
                "category_label": self.category_label}


# -- helpers ----------------------------------------------------------------------

def _rows(s: SymbolStream, first: int, last: int) -> np.ndarray:
    fi = s.frame_indices
    return np.flatnonzero((fi >= first) & (fi <= last))


def _flight_rows(s, seg) -> np.ndarray:
    a, b = seg.flight
    return _rows(s, a, b)


def _worst(s, rows, severity, k=EVIDENCE_TOP, largest=True) -> tuple:
    """(frame, severity) for the k most severe rows; ties broken by frame order."""
    ok = ~np.isnan(severity)
    rows, severity = rows[ok], severity[ok]
    key = -severity if largest else severity
    order = np.lexsort((rows, key))[:k]
    return tuple((int(s.frame_indices[rows[i]]), float(severity[i])) for i in order)


def _require_any(values, what):
    if values.size == 0 or np.all(np.isnan(values)):
        raise NoUsablePose(f"no usable frames for {what}")


# -- microprograms ----------------------------------------------------------------

def mp_feet_apart(s, seg, d, cfg) -> RawMetric:
    rows = _flight_rows(s, seg)
    rows = rows[s.usable(("pelvis", "r_ankle", "l_ankle"), cfg.min_confidence)[rows]]
    xy = s.pose_xy[rows]
    pel = xy[:, JOINT_INDEX["pelvis"]]
    ang = angles_between(xy[:, JOINT_INDEX["l_ankle"]] - pel, xy[:, JOINT_INDEX["r_ankle"]] - pel)
    _require_any(ang, "feet apart")
    return RawMetric(AspectId.FEET_APART, float(np.nanmean(ang)), _worst(s, rows, ang))


def mp_height_off_platform(s, seg, d, cfg) -> RawMetric:
    torso = torso_length_reference(s, cfg.min_confidence)
    rows = _rows(s, seg.takeoff[1] + 1, seg.entry[0])
    rows = rows[s.usable(("pelvis",), cfg.min_confidence)[rows]]
    if rows.size == 0:
        raise NoUsablePose("no pelvis observed after takeoff")
    h = (s.platform.edge_y - s.pose_xy[rows, JOINT_INDEX["pelvis"], 1]) / torso
    return RawMetric(AspectId.HEIGHT_OFF_PLATFORM, float(h.max()), _worst(s, rows, h, k=1))


def distance_category(value: float, cfg: AnalyzerConfig) -> str:
    if value < cfg.distance_band_low:
        return "too close"
    if value > cfg.distance_band_high:
        return "too far"
    return "good"


def mp_distance_from_platform(s, seg, d, cfg) -> RawMetric:
    torso = torso_length_reference(s, cfg.min_confidence)
    rows = _flight_rows(s, seg)
    x = s.pose_xy[rows, :, 0]
    # only joints below the platform top can strike its edge
    ok = (s.pose_conf[rows] >= cfg.min_confidence) & (s.pose_xy[rows, :, 1] > s.platform.edge_y)
    dist = np.where(ok, (x - s.platform.edge_x) * s.platform.facing.sign / torso, np.inf).min(axis=1)
    dist = np.where(np.isfinite(dist), dist, np.nan)
    _require_any(dist, "distance from platform (no joint below the platform in flight)")
    value = float(np.nanmin(dist))
    return RawMetric(AspectId.DISTANCE_FROM_PLATFORM, value, _worst(s, rows, dist, k=1, largest=False),
                     category=distance_category(value, cfg))


def mp_somersault_tightness(s, seg, d, cfg) -> RawMetric:
    if seg.somersault is None:
        raise PhaseAbsent("no somersault phase")
    rows = _rows(s, *seg.somersault)
    hip, knee = body_angles(s, rows, cfg)
    per = (hip + knee) / 2.0 if d.position is Position.TUCK else hip
    _require_any(per, "somersault tightness")
    return RawMetric(AspectId.SOMERSAULT_TIGHTNESS, float(np.nanmean(per)), _worst(s, rows, per, k=1))


def mp_knee_straightness(s, seg, d, cfg) -> RawMetric:
    if d.position is Position.TUCK:
        raise PhaseAbsent("tuck dives are not judged on knee straightness")
    rows = _flight_rows(s, seg)
    _, knee = body_angles(s, rows, cfg)
    dev = 180.0 - knee
    _require_any(dev, "knee straightness")
    return RawMetric(AspectId.KNEE_STRAIGHTNESS, float(np.nanmean(dev)), _worst(s, rows, dev))


def mp_twist_tightness(s, seg, d, cfg) -> RawMetric:
    if seg.twist is None:
        raise PhaseAbsent("no twist phase")
    rows = _rows(s, *seg.twist)
    hip, knee = body_angles(s, rows, cfg)
    dev = (180.0 - hip) + (180.0 - knee)
    _require_any(dev, "twist tightness")
    return RawMetric(AspectId.TWIST_TIGHTNESS, float(np.nanmean(dev)), _worst(s, rows, dev))


def _entry_line_frame(s, seg, cfg) -> int:
    """Row of the last pose with every joint visible, searched up to just after entry starts."""
    rows = _rows(s, seg.entry[0] - cfg.verticalness_search, seg.entry[0] + 2)
    full = np.all(s.pose_conf[rows] >= cfg.min_confidence, axis=1)
    rows = rows[full]
    if rows.size == 0:
        raise NoUsablePose("no fully visible pose near water entry")
    return int(rows[-1])


def mp_verticalness(s, seg, d, cfg) -> RawMetric:
    row = _entry_line_frame(s, seg, cfg)
    xy = s.pose_xy[row]
    feet = 0.5 * (xy[JOINT_INDEX["r_ankle"]] + xy[JOINT_INDEX["l_ankle"]])
    line = to_math(xy[JOINT_INDEX["head_top"]] - feet)
    a = float(angles_between(line, np.array([0.0, 1.0])))
    if np.isnan(a):
        raise NoUsablePose("head and feet coincide at entry")
    value = min(a, 180.0 - a)
    return RawMetric(AspectId.VERTICALNESS, value, ((int(s.frame_indices[row]), value),))


_LIMB_JOINTS = tuple(f"{side}_{j}" for side in "rl" for j in ("shoulder", "hip", "knee", "ankle"))


def mp_entry_straightness(s, seg, d, cfg) -> RawMetric:
    rows = _rows(s, seg.takeoff[1] + 1, seg.entry[0])
    rows = rows[s.usable(_LIMB_JOINTS, cfg.min_confidence)[rows]][-cfg.entry_window:]
    if rows.size == 0:
        raise NoUsablePose("no full-body pose before entry")
    hip, knee = body_angles(s, rows, cfg)
    dev = (180.0 - hip) + (180.0 - knee)
    return RawMetric(AspectId.ENTRY_STRAIGHTNESS, float(np.mean(dev)), _worst(s, rows, dev))


def mp_splash_size(s, seg, d, cfg) -> RawMetric:
    rows = _rows(s, *seg.entry)
    area = s.splash_area[rows]
    seen = ~np.isnan(area)
    if not seen.any():
        return RawMetric(AspectId.SPLASH_SIZE, 0.0)
    frac = area / s.frame_area
    return RawMetric(AspectId.SPLASH_SIZE, float(np.nanmax(frac)), _worst(s, rows, frac, k=1))


MICROPROGRAMS: dict = {
    AspectId.FEET_APART: mp_feet_apart,
    AspectId.HEIGHT_OFF_PLATFORM: mp_height_off_platform,
    AspectId.DISTANCE_FROM_PLATFORM: mp_distance_from_platform,
    AspectId.SOMERSAULT_TIGHTNESS: mp_somersault_tightness,
    AspectId.KNEE_STRAIGHTNESS: mp_knee_straightness,
    AspectId.TWIST_TIGHTNESS: mp_twist_tightness,
    AspectId.VERTICALNESS: mp_verticalness,
    AspectId.ENTRY_STRAIGHTNESS: mp_entry_straightness,
    AspectId.SPLASH_SIZE: mp_splash_size,
}


# -- meta-program -----------------------------------------------------------------

def meta_select(d: DiveDescriptor, seg: PhaseSegmentation) -> frozenset:
    """Aspects that apply to this dive."""
    out = set(AspectId)
    if d.position is Position.TUCK:
        out.discard(AspectId.KNEE_STRAIGHTNESS)
    if d.half_twists == 0 or seg.twist is None:
        out.discard(AspectId.TWIST_TIGHTNESS)
    if d.position is Position.STRAIGHT or seg.somersault is None:
        out.discard(AspectId.SOMERSAULT_TIGHTNESS)
    return frozenset(out)


def evaluate_aspects(s, seg, d, cfg) -> dict:
    """AspectId -> RawMetric for applicable aspects, None for the rest."""
    chosen = meta_select(d, seg)
    out = {}
    for a in ASPECTS:
        if a not in chosen:
            out[a] = None
            continue
        try:
            out[a] = MICROPROGRAMS[a](s, seg, d, cfg)
        except PhaseAbsent:
            out[a] = None
    return out


# -- percentile -------------------------------------------------------------------

@dataclass(frozen=True)
class ReferenceDistribution:
    aspects: dict                          # AspectId -> ascending tuple of floats
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for a, values in self.aspects.items():
            if len(values) < 2:
                raise InvariantViolation(f"aspects.{a.value}", "needs at least 2 samples")
            if any(b < a_ for a_, b in zip(values, values[1:])):
                raise InvariantViolation(f"aspects.{a.value}", "samples must be sorted ascending")
            if not all(np.isfinite(values)):
                raise InvariantViolation(f"aspects.{a.value}", "samples must be finite")

    def samples(self, aspect: AspectId) -> np.ndarray:
        if aspect not in self.aspects:
            raise UnknownAspect(f"reference has no samples for {aspect.value!r}")
        return np.asarray(self.aspects[aspect], dtype=float)

    def to_json(self) -> bytes:
        doc = {"metadata": self.metadata,
               "aspects": {a.value: list(self.aspects[a]) for a in ASPECTS if a in self.aspects}}
        return (json.dumps(doc, indent=1, ensure_ascii=False) + "\n").encode("utf-8")

    @classmethod
    def from_json(cls, data) -> ReferenceDistribution:
        try:
            doc = json.loads(data)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise MalformedDocument(f"reference distribution: {e}") from None
        if not isinstance(doc, dict) or not isinstance(doc.get("aspects"), dict):
            raise SchemaViolation("aspects")
        meta = doc.get("metadata", {})
        if not isinstance(meta, dict):
            raise SchemaViolation("metadata")
        aspects = {}
        for k, v in doc["aspects"].items():
            if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                  for x in v):
                raise SchemaViolation(f"aspects.{k}", "expected a list of numbers")
            aspects[aspect_id(k)] = tuple(float(x) for x in v)
        return cls(aspects, meta)

    @classmethod
    def load(cls, path) -> ReferenceDistribution:
        with open(path, "rb") as fh:
            return cls.from_json(fh.read())


def _ranked(values, polarity: Polarity, cfg: AnalyzerConfig):
    """Map values onto a lower-is-better axis."""
    values = np.asarray(values, dtype=float)
    if polarity is Polarity.HIGHER:
        return -values
    if polarity is Polarity.BAND:
        return np.abs(values - cfg.distance_band_center)
    return values


def percentile(raw: RawMetric, ref: ReferenceDistribution, cfg: Optional[AnalyzerConfig] = None) -> float:
    """Share of reference dives that did worse, counting ties as half, on 0..100."""
    cfg = cfg or AnalyzerConfig()
    samples = np.sort(_ranked(ref.samples(raw.aspect), raw.polarity, cfg))
    v = float(_ranked([raw.value], raw.polarity, cfg)[0])
    n = samples.size
    below = int(np.searchsorted(samples, v, side="left"))
    upto = int(np.searchsorted(samples, v, side="right"))
    worse = n - upto
    ties = upto - below
    return float(min(100.0, max(0.0, 100.0 * (worse + 0.5 * ties) / n)))


def round_half_up(x: float, places: int = 1) -> float:
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def display_score(pct: float) -> float:
    return round_half_up(pct / 10.0, 1)


def score_aspects(raws: dict, ref: ReferenceDistribution, cfg: Optional[AnalyzerConfig] = None) -> list:
    out = []
    for a in ASPECTS:
        raw = raws.get(a)
        if raw is None:
            out.append(AspectScore(a, False))
            continue
        p = percentile(raw, ref, cfg)
        out.append(AspectScore(a, True, raw, p, display_score(p)))
    return out


# -- aggregation ------------------------------------------------------------------

@dataclass(frozen=True)
class WeightProfile:
    weights: dict  # AspectId -> non-negative float; missing aspects weigh 0

    def __post_init__(self):
        for a, w in self.weights.items():
            if not isinstance(a, AspectId):
                raise UnknownAspect(f"unknown aspect {a!r}")
            if not np.isfinite(w) or w < 0:
                raise InvariantViolation(f"weights.{a.value}", "weights must be finite and >= 0")

    def get(self, a: AspectId) -> float:
        return float(self.weights.get(a, 0.0))

    @classmethod
    def uniform(cls) -> WeightProfile:
        return cls({a: 1.0 for a in AspectId})

    @classmethod
    def from_mapping(cls, mapping) -> WeightProfile:
        if not isinstance(mapping, dict):
            raise SchemaViolation("weights", "expected an object of aspect -> weight")
        out = {}
        for k, v in mapping.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise SchemaViolation(f"weights.{k}", "expected a number")
            out[aspect_id(k)] = float(v)
        return cls(out)

    @classmethod
    def load(cls, path) -> WeightProfile:
        with open(path, "rb") as fh:
            try:
                doc = json.loads(fh.read())
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                raise MalformedDocument(f"weights: {e}") from None
        return cls.from_mapping(doc)


def weighted_mean(scores, weights: Optional[WeightProfile] = None) -> float:
    """Unrounded aggregate over applicable aspects."""
    used = [sc for sc in scores if sc.applicable]
    if not used:
        raise NoApplicableAspects("no applicable aspect to aggregate")
    if weights is None:
        w = [1.0] * len(used)
    else:
        w = [weights.get(sc.aspect) for sc in used]
        top = max(w)
        if top <= 0:
            raise AllZeroWeights("every applicable aspect has weight 0")
        w = [x / top for x in w]
    return sum(x * sc.display for x, sc in zip(w, used)) / sum(w)


def aggregate(scores, weights: Optional[WeightProfile] = None) -> float:
    return round_half_up(weighted_mean(scores, weights), 1)


# -- reference construction -------------------------------------------------------

def measure(s: SymbolStream, cfg: AnalyzerConfig):
    """Gap-fill, recognize, segment and measure one stream."""
    s = interpolate_poses(s, cfg.max_gap)
    d = recognize(s, cfg)
    seg = segment(s, d, cfg)
    return s, d, seg, evaluate_aspects(s, seg, d, cfg)


def build_reference(corpus, cfg: Optional[AnalyzerConfig] = None, name: str = "reference",
                    provenance: str = "", jobs: int = 1,
                    on_skip: Optional[Callable] = None) -> ReferenceDistribution:
    """Pool every applicable raw metric over ``corpus``; unanalyzable streams are skipped."""
    cfg = cfg or AnalyzerConfig()
    corpus = sorted(corpus, key=lambda st: st.clip_id)
    if not corpus:
        raise EmptyCorpus("reference corpus is empty")

    def one(st):
        try:
            return measure(st, cfg)[3]
        except AnalysisError as e:
            return e

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, corpus))
    else:
        results = [one(st) for st in corpus]

    pooled = {a: [] for a in ASPECTS}
    skipped = 0
    for st, res in zip(corpus, results):
        if isinstance(res, Exception):
            skipped += 1
            if on_skip:
                on_skip(st.clip_id, res)
            continue
        for a, raw in res.items():
            if raw is not None:
                pooled[a].append(raw.value)
    for a, values in pooled.items():
        if len(values) < 2:
            raise EmptyCorpus(f"aspect {a.value!r} has {len(values)} sample(s); at least 2 are needed")
    meta = {"name": name, "sample_count": len(corpus) - skipped, "skipped": skipped,
            "provenance": provenance}
    return ReferenceDistribution({a: tuple(sorted(v)) for a, v in pooled.items()}, meta)
