"""Scenario configuration: defaults, validation, JSON loading."""

import json

import pytest

from su2reduce import config, lattice


def test_defaults_are_self_consistent():
    cfg = config.ScenarioConfig()
    assert cfg.grid_n == 16
    assert cfg.metric == lattice.EUCLIDEAN
    assert len(cfg.phase_waves) == len(cfg.phase_components)
    grid = cfg.grid()
    assert grid.dims == (16, 16, 16, 16)
    d = cfg.to_dict()
    json.dumps(d)
    assert d["contraction_center"] == [1.0, 0.0, 0.0, 0.0]


def test_field_validation():
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(grid_n=3)
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(metric="spherical")
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(coupling=0.0)
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(pauli_index=4)
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(phase_waves=(((0, 1, 0), 0.8, 0.0),))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(phase_waves=(((0, 1.5, 0, 0), 0.8, 0.0),))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(phase_components=(1, 2))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(scaling_amplitudes=(1e-2, 1e-1))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(raw_order_grids=(8,))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(contraction_n=0)
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(contraction_center=(1.0, 0.0, 0.0))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(collapse_schedule=(4, 4, 8))
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(reduce_centers=3)
    with pytest.raises(config.ConfigError):
        config.ScenarioConfig(seed=-1)


def test_load_config_overrides_and_rejects(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"grid_n": 8, "seed": 7, "collapse_schedule": [4, 8, 16]}))
    cfg = config.load_config(path)
    assert cfg.grid_n == 8
    assert cfg.seed == 7
    assert cfg.collapse_schedule == (4, 8, 16)
    # untouched fields keep their defaults
    assert cfg.coupling == 1.0

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(config.ConfigError):
        config.load_config(bad)

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"grid_m": 8}))
    with pytest.raises(config.ConfigError):
        config.load_config(unknown)

    listfile = tmp_path / "list.json"
    listfile.write_text(json.dumps([1, 2]))
    with pytest.raises(config.ConfigError):
        config.load_config(listfile)


def test_loaded_lists_become_tuples(tmp_path):
    path = tmp_path / "waves.json"
    path.write_text(
        json.dumps({"phase_waves": [[[0, 1, 0, 0], 0.4, 0.0]], "phase_components": [2]})
    )
    cfg = config.load_config(path)
    assert cfg.phase_waves == (((0, 1, 0, 0), 0.4, 0.0),)
    assert cfg.phase_components == (2,)
