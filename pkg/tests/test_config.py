import json

import pytest

from normgeom.config import RunConfig, SearchConfig, VerifyConfig
from normgeom.errors import SpecParseError


def test_defaults_are_valid():
    config = RunConfig()
    assert config.search.validate() is config.search
    assert config.search.t_max == 6.0
    assert config.verify.lambdas == (0.5, 1.0, 2.0)
    assert config.tol == 1e-9


@pytest.mark.parametrize("overrides", [
    {"theta_resolution": 8},
    {"t_grid": 4},
    {"t_max": 2.0},
    {"refine_tol": 0.0},
    {"refine_tol": 0.1},
    {"mc_samples": 0},
    {"threads": 0},
])
def test_validate_rejects(overrides):
    with pytest.raises(ValueError):
        SearchConfig(**overrides).validate()


def test_load_missing_path_gives_defaults():
    assert RunConfig.load(None) == RunConfig()


def test_load_filters_unknown_keys(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "search": {"theta_resolution": 128, "motor_gain": 3},
        "verify": {"lambdas": [0.25, 4], "trials": 10},
        "tol": 1e-8,
        "wheel_radius": 0.04,
    }))
    config = RunConfig.load(path)
    assert config.search.theta_resolution == 128
    assert config.search.phi_resolution == SearchConfig().phi_resolution
    assert config.verify.lambdas == (0.25, 4.0)
    assert config.verify.trials == 10
    assert config.verify.seed == VerifyConfig().seed
    assert config.tol == 1e-8


def test_load_rejects_malformed_files(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    with pytest.raises(SpecParseError):
        RunConfig.load(broken)
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(SpecParseError):
        RunConfig.load(listing)
    with pytest.raises(SpecParseError):
        RunConfig.load(tmp_path / "missing.json")


def test_with_overrides_skips_none():
    base = RunConfig()
    assert base.with_overrides(theta_resolution=None) is base
    changed = base.with_overrides(theta_resolution=64, t_max=None, threads=2)
    assert changed.search.theta_resolution == 64
    assert changed.search.t_max == 6.0
    assert changed.search.threads == 2
    assert base.search.theta_resolution == 4096


def test_to_dict_is_json_ready():
    data = RunConfig().to_dict()
    assert data["search"]["theta_resolution"] == 4096
    assert data["verify"]["lambdas"] == (0.5, 1.0, 2.0)
    json.dumps(data)


@pytest.mark.parametrize("data", [
    {"search": {"theta_resolution": "4096"}},
    {"search": {"theta_resolution": 64.5}},
    {"search": {"threads": True}},
    {"search": {"t_max": "6"}},
    {"verify": {"lambdas": [0.5, "one"]}},
    {"verify": {"lambdas": 2.0}},
    {"tol": [1e-9]},
    {"search": [64, 64]},
])
def test_load_rejects_mistyped_fields(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SpecParseError):
        RunConfig.load(path)


def test_load_accepts_ints_for_floats_and_null_threads(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"search": {"t_max": 8, "threads": None}, "verify": {"lambdas": [1, 2]}, "tol": 0}))
    config = RunConfig.load(path)
    assert config.search.t_max == 8.0 and isinstance(config.search.t_max, float)
    assert config.search.threads is None
    assert config.verify.lambdas == (1.0, 2.0)
    assert config.tol == 0.0
