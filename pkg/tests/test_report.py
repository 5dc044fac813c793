import dataclasses
import json
import re
from html.parser import HTMLParser

import pytest

from nsaqa.config import AnalyzerConfig
from nsaqa.errors import InconsistentInputs, MissingPlaceholder, TemplateError, UnknownAspect, UnknownPlaceholder
from nsaqa.pipeline import analyze, analyze_stream, shipped_reference
from nsaqa.recognition import DiveDescriptor, Position, RotationType
from nsaqa.report import (LABELS, SUMMARY, SentenceTemplate, compose_report, default_templates,
                          fill_template, format_number, load_templates, parse_templates, render_html)
from nsaqa.scoring import ASPECTS, AspectId, WeightProfile, aggregate, score_aspects
from nsaqa.synth import DiveScript, forward_twister_script, generate

CFG = AnalyzerConfig()


@pytest.fixture(scope="module")
def twister_report():
    s, _ = generate(forward_twister_script(noise_sigma=1.0), seed=5, clip_id="twister")
    return analyze(s, shipped_reference(), CFG)


@pytest.fixture(scope="module")
def tuck_report():
    script = DiveScript(DiveDescriptor(False, RotationType.BACKWARD, 4, 0, Position.TUCK))
    s, _ = generate(script, seed=2, clip_id="tuck")
    return analyze(s, shipped_reference(), CFG)


# -- templates --------------------------------------------------------------------

def test_feet_apart_sentence():
    t = default_templates()[AspectId.FEET_APART.value]
    out = fill_template(t, {"avg_feet_apart_deg": 12.3})
    assert out.endswith("was on average 12.3 degrees for your dive.")


def test_template_without_placeholders_is_verbatim():
    t = SentenceTemplate("summary", "Nothing to fill {{here}}.", ())
    assert fill_template(t, {}) == "Nothing to fill {here}."


def test_missing_and_unknown_values():
    t = default_templates()[AspectId.FEET_APART.value]
    with pytest.raises(MissingPlaceholder) as e:
        fill_template(t, {})
    assert e.value.name == "avg_feet_apart_deg"
    with pytest.raises(UnknownPlaceholder):
        fill_template(t, {"avg_feet_apart_deg": 1.0, "extra": 2})


@pytest.mark.parametrize("text, placeholders, error", [
    ("a {x} b", (), UnknownPlaceholder),
    ("a b", ("x",), TemplateError),
    ("a {} b", (), TemplateError),
    ("a {0} b", ("0",), TemplateError),
])
def test_template_placeholder_invariant(text, placeholders, error):
    with pytest.raises(error):
        SentenceTemplate("summary", text, placeholders)


@pytest.mark.parametrize("name, value, text", [
    ("vertical_deg", 12.34, "12.3"),
    ("vertical_deg", 0.04, "0.0"),
    ("vertical_deg", -0.04, "0.0"),
    ("height_tl", 3.0, "3.00"),
    ("splash_frac", 5000 / 921600, "0.00543"),
    ("overall_score", 7.0, "7.0"),
    ("distance_category", "too far", "too far"),
])
def test_number_formatting(name, value, text):
    assert format_number(name, value) == text


def test_library_must_cover_every_aspect_and_summary():
    doc = json.loads(json.dumps({k: {"text": v.text, "placeholders": list(v.placeholders)}
                                 for k, v in default_templates().items()}))
    assert set(parse_templates(doc)) == {a.value for a in ASPECTS} | {SUMMARY}
    short = dict(doc)
    del short["splash_size"]
    with pytest.raises(TemplateError, match="splash_size"):
        parse_templates(short)
    with pytest.raises(UnknownAspect):
        parse_templates(dict(doc, style={"text": "x", "placeholders": []}))
    with pytest.raises(TemplateError):
        parse_templates(dict(doc, summary={"text": "x"}))
    with pytest.raises(TemplateError):
        parse_templates([1])


def test_custom_library_changes_wording(tmp_path, twister_report):
    doc = {k: {"text": v.text, "placeholders": list(v.placeholders)} for k, v in default_templates().items()}
    doc["verticalness"] = {"text": "Entry angle {vertical_deg} deg.", "placeholders": ["vertical_deg"]}
    path = tmp_path / "t.json"
    path.write_text(json.dumps(doc))
    templates = load_templates(path)
    r = twister_report
    again = compose_report(_twister_stream(), r.descriptor, r.segmentation, r.aspect_scores, r.overall,
                           templates=templates)
    assert re.fullmatch(r"Entry angle \d+\.\d deg\.", again.sentences[AspectId.VERTICALNESS])


def _twister_stream():
    s, _ = generate(forward_twister_script(noise_sigma=1.0), seed=5, clip_id="twister")
    return analyze_stream(s, CFG).stream


# -- composition ------------------------------------------------------------------

def test_tuck_report_has_no_knee_sentence(tuck_report):
    r = tuck_report
    assert r.descriptor.position is Position.TUCK
    assert AspectId.KNEE_STRAIGHTNESS not in r.sentences
    assert AspectId.TWIST_TIGHTNESS not in r.sentences
    assert not r.score(AspectId.KNEE_STRAIGHTNESS).applicable
    html = render_html(r).decode()
    row = re.search(r'<tr data-aspect="knee_straightness">(.*?)</tr>', html).group(1)
    assert "N/A" in row


def test_sentences_exist_exactly_for_applicable_aspects(twister_report, tuck_report):
    for r in (twister_report, tuck_report):
        assert set(r.sentences) == {sc.aspect for sc in r.aspect_scores if sc.applicable}
        assert set(r.evidence) == set(r.sentences)
        assert r.overall == aggregate(r.aspect_scores)
        for ev in r.evidence.values():
            sev = [v for _, v in ev]
            assert sev == sorted(sev, reverse=True)


def test_compose_is_deterministic(twister_report):
    r = twister_report
    s = _twister_stream()
    again = compose_report(s, r.descriptor, r.segmentation, r.aspect_scores, r.overall)
    assert again == r
    assert again.to_json() == r.to_json()


def test_inconsistent_inputs_rejected(twister_report):
    r = twister_report
    s = _twister_stream()
    with pytest.raises(InconsistentInputs):
        compose_report(s, r.descriptor, r.segmentation, r.aspect_scores, r.overall + 0.1)
    with pytest.raises(InconsistentInputs):
        compose_report(s, r.descriptor, r.segmentation, r.aspect_scores[::-1], r.overall)
    late = dataclasses.replace(r.segmentation, entry=(r.segmentation.entry[0], 10_000))
    with pytest.raises(InconsistentInputs):
        compose_report(s, r.descriptor, late, r.aspect_scores, r.overall)
    short = s.with_frames(s.frames[:100])
    with pytest.raises(InconsistentInputs):
        compose_report(short, r.descriptor, dataclasses.replace(r.segmentation, entry=(90, 99)),
                       r.aspect_scores, r.overall)


def test_weights_carry_into_the_overall(twister_report):
    r = twister_report
    s = _twister_stream()
    w = WeightProfile({AspectId.SPLASH_SIZE: 1.0})
    overall = aggregate(r.aspect_scores, w)
    again = compose_report(s, r.descriptor, r.segmentation, r.aspect_scores, overall, weights=w)
    assert again.overall == r.score(AspectId.SPLASH_SIZE).display
    assert f"{overall:.1f} out of 10" in again.summary


def test_report_json_shape(twister_report):
    doc = json.loads(twister_report.to_json())
    assert list(doc) == ["clip_id", "descriptor", "description", "segmentation", "aspects", "evidence",
                         "overall", "summary"]
    assert [a["aspect"] for a in doc["aspects"]] == [a.value for a in ASPECTS]
    assert doc["overall"] == twister_report.overall


# -- HTML -------------------------------------------------------------------------

class _Structure(HTMLParser):
    def __init__(self):
        super().__init__()
        self.tags = []
        self.rows = []

    def handle_starttag(self, tag, attrs):
        self.tags.append(tag)
        attrs = dict(attrs)
        if tag == "tr" and "data-aspect" in attrs:
            self.rows.append(attrs["data-aspect"])


def test_html_structure(twister_report, tuck_report):
    for r in (twister_report, tuck_report):
        p = _Structure()
        p.feed(render_html(r).decode("utf-8"))
        assert p.tags.count("table") == 1
        assert p.rows == [a.value for a in ASPECTS]
        assert p.tags.count("link") == 0 and p.tags.count("script") == 0


def test_html_is_byte_deterministic(twister_report):
    assert render_html(twister_report) == render_html(twister_report)


def test_html_numbers_round_trip(twister_report):
    r = twister_report
    html = render_html(r).decode()
    for sc in r.aspect_scores:
        row = re.search(rf'<tr data-aspect="{sc.aspect.value}">(.*?)</tr>', html).group(1)
        cells = re.findall(r"<td[^>]*>(.*?)</td>", row)
        assert cells[0] == LABELS[sc.aspect]
        if not sc.applicable:
            assert cells[1] == "N/A"
            continue
        assert float(cells[1].split()[0]) == sc.display
        frames = [int(m) for m in re.findall(r"(\d+) \(", cells[3])]
        assert frames == [f for f, _ in r.evidence[sc.aspect]]
        shown = [float(m) for m in re.findall(r"\(([-\d.e]+) ", cells[3])]
        for got, (_, sev) in zip(shown, r.evidence[sc.aspect]):
            assert got == pytest.approx(sev, rel=5e-3, abs=0.051)
    assert f"{r.overall:.1f} out of 10" in html


def test_html_escapes_text(twister_report):
    r = dataclasses.replace(twister_report, clip_id="<b>&dive</b>")
    html = render_html(r).decode()
    assert "<b>&dive</b>" not in html
    assert "&lt;b&gt;&amp;dive&lt;/b&gt;" in html


def test_inapplicable_scores_have_no_numbers(tuck_report):
    scores = score_aspects({a: None for a in ASPECTS} | {
        AspectId.SPLASH_SIZE: tuck_report.score(AspectId.SPLASH_SIZE).raw}, shipped_reference(), CFG)
    assert sum(sc.applicable for sc in scores) == 1
