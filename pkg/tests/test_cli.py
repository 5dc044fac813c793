import json

import pytest

from nsaqa import corpus
from nsaqa.cli import main
from nsaqa.recognition import DiveDescriptor
from nsaqa.segmentation import PHASES
from nsaqa.synth import forward_twister_script, generate

from .conftest import make_pose, make_stream


@pytest.fixture(scope="module")
def twister_file(tmp_path_factory):
    d = tmp_path_factory.mktemp("twister")
    s, _ = generate(forward_twister_script(noise_sigma=1.0), seed=5, clip_id="twister")
    corpus.write_pair(d, s)
    return d / "twister.jsonl"


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "5", "3", str(d)]) == 0
    return d


def test_analyze_writes_html_and_json(tmp_path, twister_file, capsys):
    out = tmp_path / "r.html"
    assert main(["analyze", str(twister_file), "--out", str(out)]) == 0
    printed = capsys.readouterr().out.strip()
    doc = json.loads(out.with_suffix(".json").read_text())
    assert out.read_text().startswith("<!DOCTYPE html>")
    assert printed == f"{doc['overall']:.1f}"


def test_analyze_with_missing_reference(tmp_path, twister_file, capsys):
    code = main(["analyze", str(twister_file), "--out", str(tmp_path / "r.html"),
                 "--ref", str(tmp_path / "absent.json")])
    assert code == 1
    assert "absent.json" in capsys.readouterr().err


def test_analysis_failure_exits_two(tmp_path, capsys):
    still = make_pose({"pelvis": (150, 190), "thorax": (150, 140), "r_ankle": (150, 290), "l_ankle": (150, 290)})
    corpus.write_pair(tmp_path, make_stream([still] * 10))
    path = next(tmp_path.glob("*.jsonl"))
    assert main(["analyze", str(path), "--out", str(tmp_path / "r.html")]) == 2
    assert "NeverLeavesPlatform" in capsys.readouterr().err
    assert not (tmp_path / "r.html").exists()


def test_recognize_and_segment_print_json(twister_file, capsys):
    assert main(["recognize", str(twister_file)]) == 0
    d = json.loads(capsys.readouterr().out)
    assert DiveDescriptor.from_dict(d) == forward_twister_script().descriptor
    assert main(["segment", str(twister_file)]) == 0
    assert list(json.loads(capsys.readouterr().out)) == list(PHASES)


def test_invalid_stream_exits_one(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"clip_id": "x"}\n')
    assert main(["recognize", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_config_key_exits_one(twister_file, capsys):
    assert main(["recognize", str(twister_file), "--set", "bogus=1"]) == 1
    assert "bogus" in capsys.readouterr().err


def test_config_override_applies(twister_file, capsys):
    assert main(["segment", str(twister_file), "--set", "takeoff_distance_threshold=0.8"]) == 0
    late = json.loads(capsys.readouterr().out)["takeoff"][1]
    main(["segment", str(twister_file)])
    assert late > json.loads(capsys.readouterr().out)["takeoff"][1]


def test_synth_writes_pairs_reproducibly(synth_dir, tmp_path):
    assert len(list(synth_dir.iterdir())) == 10
    assert main(["synth", "5", "3", str(tmp_path)]) == 0
    for p in synth_dir.iterdir():
        assert (tmp_path / p.name).read_bytes() == p.read_bytes()
    assert main(["synth", "0", "3", str(tmp_path / "none")]) == 1


def test_build_ref_is_reproducible(synth_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["build-ref", str(synth_dir), str(a), "--name", "five"]) == 0
    assert main(["build-ref", str(synth_dir), str(b), "--name", "five", "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["metadata"]["name"] == "five"


def test_build_ref_on_empty_dir(tmp_path, capsys):
    assert main(["build-ref", str(tmp_path), str(tmp_path / "r.json")]) == 1
    assert "EmptyCorpus" in capsys.readouterr().err


def test_eval(synth_dir, tmp_path, capsys):
    assert main(["eval", str(synth_dir)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["n"] == 5 and set(result["aiou"]) == {"0.5", "0.75"}

    one = next(synth_dir.glob("*.jsonl"))
    (tmp_path / one.name).write_bytes(one.read_bytes())
    assert main(["eval", str(tmp_path)]) == 1
    assert "MissingGroundTruth" in capsys.readouterr().err
    truth = one.name.replace(".jsonl", ".truth.json")
    (tmp_path / truth).write_bytes((synth_dir / truth).read_bytes())
    assert main(["eval", str(tmp_path)]) == 0
    assert json.loads(capsys.readouterr().out)["n"] == 1


def test_bad_usage_exits_one(capsys):
    assert main([]) == 1
    assert main(["analyze"]) == 1
    assert main(["--help"]) == 0
