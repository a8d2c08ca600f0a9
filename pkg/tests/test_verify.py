import pytest

from models.errors import ConfigError
from runner.config import config_from_mapping
from runner.verify import PROFILES, acceptance_steps


@pytest.mark.parametrize("profile", PROFILES)
def test_every_acceptance_step_is_a_valid_config(profile):
    steps = acceptance_steps(profile)
    labels = [label for label, _ in steps]
    assert len(labels) == len(set(labels))
    assert {"counterexample", "prior-witness", "olea-gap", "head-to-head"} <= set(labels)
    for _, mapping in steps:
        config_from_mapping(dict(mapping, workers=1))


def test_default_profile_uses_full_scales():
    steps = dict(acceptance_steps("default"))
    assert steps["counterexample"]["x_size"] == 5
    assert steps["olea-gap"]["horizon"] == 10
    assert steps["lln-seed2"]["x_size"] == 1000


def test_unknown_profile():
    with pytest.raises(ConfigError):
        acceptance_steps("huge")
