"""Natural-language dive reports from template sentences, rendered to HTML."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import jinja2

from .errors import InconsistentInputs, MissingPlaceholder, TemplateError, UnknownPlaceholder
from .recognition import DiveDescriptor
from .scoring import ASPECTS, AspectId, AspectScore, UNITS, aggregate, aspect_id
from .segmentation import PHASES, PhaseSegmentation
from .symbols import SymbolStream

SUMMARY = "summary"

LABELS = {
    AspectId.FEET_APART: "Feet Apart",
    AspectId.HEIGHT_OFF_PLATFORM: "Height off Platform",
    AspectId.DISTANCE_FROM_PLATFORM: "Distance from Platform",
    AspectId.SOMERSAULT_TIGHTNESS: "Somersault Tightness",
    AspectId.KNEE_STRAIGHTNESS: "Knee Straightness",
    AspectId.TWIST_TIGHTNESS: "Twist Tightness",
    AspectId.VERTICALNESS: "Verticalness",
    AspectId.ENTRY_STRAIGHTNESS: "Body Straightness During Entry",
    AspectId.SPLASH_SIZE: "Splash Size",
}

# placeholder fed by each aspect's raw value
_VALUE_SLOT = {
    AspectId.FEET_APART: "avg_feet_apart_deg",
    AspectId.HEIGHT_OFF_PLATFORM: "height_tl",
    AspectId.DISTANCE_FROM_PLATFORM: "distance_tl",
    AspectId.SOMERSAULT_TIGHTNESS: "tightness_deg",
    AspectId.KNEE_STRAIGHTNESS: "knee_bend_deg",
    AspectId.TWIST_TIGHTNESS: "twist_bend_deg",
    AspectId.VERTICALNESS: "vertical_deg",
    AspectId.ENTRY_STRAIGHTNESS: "entry_bend_deg",
    AspectId.SPLASH_SIZE: "splash_frac",
}

UNIT_LABELS = {"deg": "deg", "torso_lengths": "torso lengths", "frame_fraction": "of frame"}

_UNIT_SUFFIX = {"deg": "_deg", "torso_lengths": "_tl", "frame_fraction": "_frac"}


def format_number(name: str, value) -> str:
    """Fixed formatting keyed on the placeholder suffix."""
    if isinstance(value, str):
        return value
    v = float(value)
    if name.endswith(("_deg", "_score")):
        out = f"{v:.1f}"
    elif name.endswith("_tl"):
        out = f"{v:.2f}"
    elif name.endswith("_frac"):
        out = f"{v:.3g}"
    else:
        out = repr(v)
    return "0" + out[2:] if out.startswith("-0") and float(out) == 0 else out


def format_unit_value(unit: str, value: float) -> str:
    return format_number(_UNIT_SUFFIX[unit], value)


@dataclass(frozen=True)
class SentenceTemplate:
    key: str  # aspect id or "summary"
    text: str
    placeholders: tuple

    def __post_init__(self):
        found = {name for _, name, _, _ in string.Formatter().parse(self.text) if name is not None}
        declared = set(self.placeholders)
        if "" in found or any(not n.isidentifier() for n in found):
            raise TemplateError(f"template {self.key!r}: placeholders must be named")
        for name in sorted(found - declared):
            raise UnknownPlaceholder(f"template {self.key!r} uses undeclared placeholder {name!r}")
        for name in sorted(declared - found):
            raise TemplateError(f"template {self.key!r} declares unused placeholder {name!r}")


def fill_template(t: SentenceTemplate, values: dict) -> str:
    for name in t.placeholders:
        if name not in values:
            raise MissingPlaceholder(name)
    for name in sorted(set(values) - set(t.placeholders)):
        raise UnknownPlaceholder(name)
    return t.text.format_map({k: format_number(k, v) for k, v in values.items()})


def parse_templates(doc) -> dict:
    if not isinstance(doc, dict):
        raise TemplateError("template library must be a JSON object")
    out = {}
    for key, entry in doc.items():
        if key != SUMMARY:
            aspect_id(key)
        if not isinstance(entry, dict) or not isinstance(entry.get("text"), str) \
                or not isinstance(entry.get("placeholders"), list):
            raise TemplateError(f"template {key!r} needs 'text' and 'placeholders'")
        out[key] = SentenceTemplate(key, entry["text"], tuple(entry["placeholders"]))
    missing = [a.value for a in ASPECTS if a.value not in out] + ([SUMMARY] if SUMMARY not in out else [])
    if missing:
        raise TemplateError(f"template library lacks {', '.join(missing)}")
    return out


@lru_cache(maxsize=1)
def default_templates() -> dict:
    text = resources.files("nsaqa").joinpath("data/templates.json").read_text("utf-8")
    return parse_templates(json.loads(text))


def load_templates(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_templates(json.load(fh))


@dataclass(frozen=True)
class DiveReport:
    clip_id: str
    descriptor: DiveDescriptor
    segmentation: PhaseSegmentation
    aspect_scores: tuple
    overall: float
    sentences: dict   # AspectId -> sentence, applicable aspects only
    evidence: dict    # AspectId -> tuple of (frame, severity), most severe first
    summary: str

    def score(self, aspect: AspectId) -> AspectScore:
        return next(sc for sc in self.aspect_scores if sc.aspect is aspect)

    def to_dict(self) -> dict:
        return {
            "clip_id": self.clip_id,
            "descriptor": self.descriptor.to_dict(),
            "description": self.descriptor.describe(),
            "segmentation": self.segmentation.to_dict(),
            "aspects": [
                dict(sc.to_dict(), sentence=self.sentences.get(sc.aspect)) for sc in self.aspect_scores
            ],
            "evidence": {a.value: [{"frame": f, "severity": v, "unit": UNITS[a]} for f, v in ev]
                         for a, ev in self.evidence.items()},
            "overall": self.overall,
            "summary": self.summary,
        }

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def _check_frames(s: SymbolStream, frames, what):
    lo, hi = int(s.frame_indices[0]), int(s.frame_indices[-1])
    for f in frames:
        if not lo <= f <= hi:
            raise InconsistentInputs(f"{what} frame {f} is not in stream {s.clip_id!r}")


def compose_report(s: SymbolStream, d: DiveDescriptor, seg: PhaseSegmentation, scores, overall: float,
                   weights=None, templates: Optional[dict] = None) -> DiveReport:
    templates = templates or default_templates()
    scores = tuple(scores)
    if [sc.aspect for sc in scores] != list(ASPECTS):
        raise InconsistentInputs("scores must list every aspect once, in canonical order")
    for name in PHASES:
        rng = seg.get(name)
        if rng is not None:
            _check_frames(s, rng, f"{name} phase")
    if aggregate(scores, weights) != overall:
        raise InconsistentInputs(f"overall {overall} does not match the aspect scores")

    sentences, evidence = {}, {}
    for sc in scores:
        if not sc.applicable:
            continue
        raw = sc.raw
        _check_frames(s, raw.evidence_frames, f"{sc.aspect.value} evidence")
        values = {_VALUE_SLOT[sc.aspect]: raw.value}
        if sc.aspect is AspectId.DISTANCE_FROM_PLATFORM:
            values["distance_category"] = raw.category
        sentences[sc.aspect] = fill_template(templates[sc.aspect.value], values)
        evidence[sc.aspect] = tuple(sorted(raw.evidence, key=lambda e: (-e[1], e[0])))
    summary = fill_template(templates[SUMMARY], {"dive": d.describe(), "overall_score": overall})
    return DiveReport(s.clip_id, d, seg, scores, overall, sentences, evidence, summary)


@lru_cache(maxsize=1)
def _html_template() -> jinja2.Template:
    env = jinja2.Environment(
        loader=jinja2.PackageLoader("nsaqa", "data"),
        autoescape=True,
        keep_trailing_newline=True,
        undefined=jinja2.StrictUndefined,
    )
    return env.get_template("report.html.j2")


def render_html(r: DiveReport) -> bytes:
    rows = []
    for sc in r.aspect_scores:
        row = {"id": sc.aspect.value, "label": LABELS[sc.aspect], "applicable": sc.applicable}
        if sc.applicable:
            unit = UNITS[sc.aspect]
            row.update(
                score=format_number("_score", sc.display),
                category=sc.category_label,
                sentence=r.sentences[sc.aspect],
                evidence=[{"frame": f, "severity": format_unit_value(unit, v),
                           "unit": UNIT_LABELS[unit]}
                          for f, v in r.evidence[sc.aspect]],
            )
        rows.append(row)
    phases = [{"name": p, "range": r.segmentation.get(p)} for p in PHASES]
    html = _html_template().render(clip_id=r.clip_id, dive=r.descriptor.describe(), phases=phases,
                                   rows=rows, summary=r.summary)
    return html.encode("utf-8")
