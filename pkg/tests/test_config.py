import json

import pytest

from nsaqa.config import CONFIG_ENV_VAR, AnalyzerConfig, load_config, parse_overrides
from nsaqa.errors import ConfigError


def test_defaults():
    cfg = AnalyzerConfig()
    assert cfg.som_angle_threshold_deg == 75.0
    assert cfg.takeoff_distance_threshold == 0.5
    assert (cfg.position_knee_tuck_deg, cfg.position_hip_tuck_deg,
            cfg.position_hip_pike_deg, cfg.position_straight_deg) == (110, 110, 120, 160)
    assert cfg.max_gap == 3 and cfg.min_confidence == 0.1
    assert cfg.distance_band_center == pytest.approx(1.15)


@pytest.mark.parametrize("changes", [
    {"som_angle_threshold_deg": 95},
    {"som_angle_threshold_deg": 0},
    {"petal_inner_radius": 3.0},
    {"min_confidence": 1.5},
    {"max_gap": -1},
    {"takeoff_distance_threshold": -0.2},
    {"distance_band_low": 3.0},
])
def test_invalid_values_rejected(changes):
    with pytest.raises(ConfigError):
        AnalyzerConfig().replace(**changes)


def test_unknown_key_and_bad_types_rejected():
    with pytest.raises(ConfigError, match="unknown"):
        AnalyzerConfig().replace(nonsense=1)
    with pytest.raises(ConfigError):
        AnalyzerConfig().replace(max_gap="two")
    with pytest.raises(ConfigError):
        AnalyzerConfig().replace(max_gap=2.5)
    with pytest.raises(ConfigError):
        AnalyzerConfig().replace(max_gap=True)


def test_string_overrides_are_coerced():
    cfg = AnalyzerConfig().replace(max_gap="5", som_angle_threshold_deg="70")
    assert cfg.max_gap == 5 and isinstance(cfg.max_gap, int)
    assert cfg.som_angle_threshold_deg == 70.0


def test_parse_overrides():
    assert parse_overrides(["a=1", " b = x "]) == {"a": "1", "b": "x"}
    assert parse_overrides(None) == {}
    for bad in (["novalue"], ["=3"]):
        with pytest.raises(ConfigError):
            parse_overrides(bad)


def test_precedence_file_then_overrides(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"max_gap": 1, "facing_window": 7}))
    cfg = load_config(env={CONFIG_ENV_VAR: str(path)}, overrides={"max_gap": "4"})
    assert cfg.max_gap == 4 and cfg.facing_window == 7
    assert load_config(env={}) == AnalyzerConfig()


@pytest.mark.parametrize("content", ["[1, 2]", "{oops", '{"bogus": 1}'])
def test_bad_config_files(tmp_path, content):
    path = tmp_path / "cfg.json"
    path.write_text(content)
    with pytest.raises(ConfigError):
        load_config(path, env={})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json", env={})


def test_round_trip_through_dict():
    cfg = AnalyzerConfig().replace(petal_outer_radius=1.8)
    assert AnalyzerConfig.from_mapping(cfg.to_dict()) == cfg
