from fractions import Fraction
from pathlib import Path

import pytest

from models.errors import ConfigError
from runner.config import config_from_mapping, parse_config, resolve_loss, resolve_pi


def write(tmp_path, text, name="experiment.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_counterexample_defaults(tmp_path):
    config = parse_config(write(tmp_path, "experiment: counterexample\n"))
    assert config.x_size == 5
    assert config.y_size == 2
    assert config.m == 3
    assert config.sampling == "distinct"
    assert not config.replacement
    assert config.learners == ["majority", "anti-majority"]
    assert config.workers >= 1


def test_misspelled_learner_points_at_its_line(tmp_path):
    path = write(tmp_path, "experiment: nfl-f-average\nlearners: [majorty, random]\n")
    with pytest.raises(ConfigError) as info:
        parse_config(path)
    assert info.value.field == "learners"
    assert info.value.line == 2


def test_even_m_is_rejected_for_the_counterexample(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: counterexample\nx_size: 6\nm: 4\n"))
    assert info.value.field == "m"
    assert info.value.line == 3


def test_unknown_experiment_and_keys(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: free-lunch\n"))
    assert info.value.field == "experiment"
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: lln\nsamples: 10\n"))
    assert info.value.field == "samples"


def test_type_errors(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: nfl-f-average\nm: three\n"))
    assert info.value.field == "m"
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: nfl-f-average\nforce: 1\n"))
    assert info.value.field == "force"


def test_lln_needs_a_large_input_space():
    config = config_from_mapping({"experiment": "lln", "x_size": 100, "m": 10, "n_samples": 5})
    assert config.x_size == 100
    with pytest.raises(ConfigError) as info:
        config_from_mapping({"experiment": "lln", "x_size": 99, "m": 10})
    assert info.value.field == "x_size"


def test_overrides_take_precedence(tmp_path):
    path = write(tmp_path, "experiment: prior-average\nseed: 1\nworkers: 3\n")
    config = parse_config(path, {"seed": 9, "workers": None, "output_dir": str(tmp_path / "out")})
    assert config.seed == 9
    assert config.workers == 3
    assert config.output_dir == tmp_path / "out"


def test_explicit_sampling_distribution(tmp_path):
    config = parse_config(write(tmp_path, "experiment: nfl-f-average\nx_size: 2\npi: [1/4, 3/4]\n"))
    assert resolve_pi(config).weights == (Fraction(1, 4), Fraction(3, 4))
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: nfl-f-average\nx_size: 3\npi: [1/4, 3/4]\n"))
    assert info.value.field == "pi"


def test_loss_file_is_relative_to_the_config(tmp_path):
    (tmp_path / "lopsided.txt").write_text("loss,0/1,1/1\nloss,0/1,0/1\n")
    config = parse_config(write(tmp_path, "experiment: nfl-f-average\nloss: file:lopsided.txt\nforce: true\n"))
    loss = resolve_loss(config)
    assert loss.name == "file:lopsided.txt"
    assert loss(0, 1) == 1
    assert loss(1, 0) == 0


def test_loss_must_match_the_output_space(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: nfl-f-average\ny_size: 3\nloss: unknown\n"))
    assert info.value.field == "loss"


def test_gap_horizon_limit():
    assert config_from_mapping({"experiment": "olea-gap", "horizon": 14}).horizon == 14
    with pytest.raises(ConfigError) as info:
        config_from_mapping({"experiment": "olea-gap", "horizon": 15})
    assert info.value.field == "horizon"
    sampled = config_from_mapping({"experiment": "olea-gap", "horizon": 30, "experts": 3, "n_samples": 10})
    assert sampled.experts == 3


def test_embedding_window():
    with pytest.raises(ConfigError) as info:
        config_from_mapping({"experiment": "olea-embedding", "x_size": 4, "m": 2})
    assert info.value.field == "m"


def test_malformed_yaml(tmp_path):
    with pytest.raises(ConfigError) as info:
        parse_config(write(tmp_path, "experiment: lln\nlearners: [constant:0\n"))
    assert info.value.line is not None
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, "- just\n- a list\n"))
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.yaml")


def test_sequences_path_is_relative_to_the_config(tmp_path):
    config = parse_config(write(tmp_path, "experiment: olea-gap\nhorizon: 4\nsequences: adversary.txt\n"))
    assert config.source == Path(tmp_path) / "adversary.txt"
