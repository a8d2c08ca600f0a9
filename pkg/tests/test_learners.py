from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from models.data_models import Dataset, FiniteDomain, SamplingDistribution, StochasticHypothesis, TargetFunction
from models.errors import InvalidValueError, NonBinaryError
from engine.costs import ots_cost, zero_one_loss
from engine.learners import (
    CvSelectionMode, anti_majority_learner, constant_learner, constant_output_learner, cv_meta, cv_select,
    loo_cv_error, majority_label, majority_learner, random_guess_learner, resolve_learner
)

DOMAIN = FiniteDomain(5, 2)
LOSS = zero_one_loss(DOMAIN)


def dataset(*ys):
    return Dataset(tuple(enumerate(ys)))


@pytest.mark.parametrize("ys, expected", [((1, 1, 0), 1), ((0, 0, 0), 0), ((0, 1), 1)])
def test_majority_label(ys, expected):
    assert majority_label(ys) == expected


def test_majority_and_anti_majority_predictions():
    d = dataset(1, 1, 0)
    assert majority_learner().train(d, DOMAIN).deterministic_outputs == (1, 1, 0, 1, 1)
    assert anti_majority_learner().train(d, DOMAIN).deterministic_outputs == (1, 1, 0, 0, 0)
    assert anti_majority_learner().train(dataset(0, 0, 0), DOMAIN).deterministic_outputs == (0, 0, 0, 1, 1)


def test_latest_pair_wins_on_duplicate_inputs():
    d = Dataset(((0, 1), (0, 0)))
    assert majority_learner().train(d, FiniteDomain(3, 2)).deterministic_outputs == (0, 1, 1)


@given(ys=st.lists(st.integers(0, 1), min_size=1, max_size=4))
def test_anti_majority_complements_majority_off_the_training_set(ys):
    d = dataset(*ys)
    maj = majority_learner().train(d, DOMAIN).deterministic_outputs
    anti = anti_majority_learner().train(d, DOMAIN).deterministic_outputs
    for x in range(DOMAIN.x_size):
        if x < len(ys):
            assert maj[x] == anti[x] == ys[x]
        else:
            assert maj[x] == 1 - anti[x]


def test_binary_learners_refuse_larger_output_spaces():
    domain = FiniteDomain(3, 3)
    for learner in (majority_learner(), anti_majority_learner(), random_guess_learner()):
        with pytest.raises(NonBinaryError):
            learner.train(Dataset(((0, 2),)), domain)


def test_constant_learner_ignores_the_data():
    h_star = StochasticHypothesis.deterministic(DOMAIN, (0, 1, 0, 1, 0))
    learner = constant_learner(h_star)
    assert learner.train(dataset(1), DOMAIN) is h_star
    assert learner.train(dataset(0, 0), DOMAIN) == learner.train(dataset(1, 1, 1), DOMAIN)
    assert learner.name == "constant:01010"


def test_constant_output_learner_patterns():
    assert constant_output_learner("1").train(dataset(0), DOMAIN).deterministic_outputs == (1,) * 5
    assert constant_output_learner("01101").train(dataset(0), DOMAIN).deterministic_outputs == (0, 1, 1, 0, 1)
    with pytest.raises(InvalidValueError):
        constant_output_learner("x")


def test_random_guess_is_a_fair_coin():
    h = random_guess_learner().train(dataset(1, 0), DOMAIN)
    assert all(row == (Fraction(1, 2), Fraction(1, 2)) for row in h.per_query)
    f = TargetFunction(DOMAIN, (1, 0, 1, 1, 0))
    assert ots_cost(f, h, Dataset(((0, 1), (1, 0))), SamplingDistribution.uniform(5), LOSS) == Fraction(1, 2)


def test_loo_cv_error_examples():
    assert loo_cv_error(majority_learner(), dataset(1, 1, 1), LOSS, DOMAIN) == 0
    assert loo_cv_error(anti_majority_learner(), dataset(1, 1, 1), LOSS, DOMAIN) == 1
    assert loo_cv_error(majority_learner(), dataset(1, 1, 0), LOSS, DOMAIN) == Fraction(1, 3)
    with pytest.raises(InvalidValueError):
        loo_cv_error(majority_learner(), dataset(1), LOSS, DOMAIN)


def test_cv_selection_and_ties():
    algos = [majority_learner(), anti_majority_learner()]
    d = dataset(1, 1, 1)
    assert cv_select(algos, d, DOMAIN, LOSS, CvSelectionMode.MIN) == 0
    assert cv_select(algos, d, DOMAIN, LOSS, CvSelectionMode.MAX) == 1
    twins = [majority_learner(), majority_learner()]
    assert cv_select(twins, d, DOMAIN, LOSS, CvSelectionMode.MIN) == 0
    assert cv_select(twins, d, DOMAIN, LOSS, CvSelectionMode.MAX) == 0


def test_anti_cross_validation_fails_on_a_constant_target():
    f = TargetFunction(DOMAIN, (1, 1, 1, 1, 1))
    d = dataset(1, 1, 1)
    anti_cv = cv_meta([majority_learner(), anti_majority_learner()], CvSelectionMode.MAX)
    h = anti_cv.train(d, DOMAIN)
    assert h.deterministic_outputs == (1, 1, 1, 0, 0)
    assert ots_cost(f, h, d, SamplingDistribution.uniform(5), LOSS) == 1


def test_learners_are_deterministic():
    d = dataset(0, 1, 1)
    for name in ("majority", "anti-majority", "random", "constant:0", "cv:min:majority,anti-majority"):
        learner = resolve_learner(name)
        assert learner.train(d, DOMAIN) == learner.train(d, DOMAIN)


def test_registry_names():
    assert resolve_learner("cv:max:majority,anti-majority").name == "cv:max:majority,anti-majority"
    assert resolve_learner("constant:1").name == "constant:1"
    with pytest.raises(InvalidValueError):
        resolve_learner("majorty")
    with pytest.raises(InvalidValueError):
        resolve_learner("cv:best:majority")
