import pytest

from engine.config import DEFAULT_CONFIG, Bounds, RunConfig, load_config


def test_defaults():
    config = load_config(env={})
    assert config == DEFAULT_CONFIG
    assert config.seed == 20240601
    assert config.bounds == Bounds(harvest=4, closure=4, legs=6)
    assert config.output == 'json'


def test_environment_overrides():
    config = load_config(env={
        'PARTITIONS_SEED': '7',
        'PARTITIONS_TOLERANCE': '1e-9',
        'PARTITIONS_CLOSURE_BOUND': '5',
        'PARTITIONS_OUTPUT': ' text ',
    })
    assert config.seed == 7
    assert config.tolerance == 1e-9
    assert config.bounds.closure == 5
    assert config.bounds.harvest == 4
    assert config.output == 'text'


def test_empty_variables_keep_the_defaults():
    assert load_config(env={'PARTITIONS_SEED': ''}).seed == DEFAULT_CONFIG.seed


def test_unparsable_variables():
    with pytest.raises(ValueError, match="cannot parse PARTITIONS_SAMPLES"):
        load_config(env={'PARTITIONS_SAMPLES': 'many'})


def test_invalid_settings():
    with pytest.raises(ValueError, match="output must be one of"):
        load_config(env={'PARTITIONS_OUTPUT': 'xml'})
    with pytest.raises(ValueError):
        RunConfig(samples=0)


def test_process_environment(monkeypatch):
    monkeypatch.setenv('PARTITIONS_WORKERS', '3')
    assert load_config().workers == 3


def test_overrides_skip_unset_values():
    config = RunConfig(seed=5).with_overrides(seed=None, output='text', closure=6)
    assert config.seed == 5
    assert config.output == 'text'
    assert config.bounds == Bounds(harvest=4, closure=6, legs=6)


def test_to_dict():
    found = RunConfig().to_dict()
    assert found["bounds"] == {"harvest": 4, "closure": 4, "legs": 6}
    assert RunConfig().sampling() == {"seed": 20240601, "tolerance": 1e-6, "samples": 2000, "rank_threshold": 1e-6}
