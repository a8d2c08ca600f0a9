from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from models.data_models import (
    Dataset, FiniteDomain, LossFunction, QueryWeighting, SamplingDistribution, StochasticHypothesis,
    TargetFunction, WeightingMode
)
from models.errors import EmptyOtsError
from engine.costs import (
    check_homogeneous, cost_atoms, cyclic_loss, data_blind_cost, empirical_cost, generic_cost, ots_cost,
    training_set_loss, zero_one_loss
)
from engine.learners import constant_learner

HALF = Fraction(1, 2)


def blind(x_size):
    return QueryWeighting(WeightingMode.DATA_BLIND, SamplingDistribution.uniform(x_size))


def test_zero_one_loss():
    loss = zero_one_loss(FiniteDomain(3, 2))
    assert loss(0, 0) == 0
    assert loss(0, 1) == 1
    assert loss.table == ((0, 1), (1, 0))


def test_cyclic_loss_is_homogeneous_but_not_symmetric():
    loss = cyclic_loss(FiniteDomain(2, 3))
    assert loss(0, 2) == 2
    assert loss(2, 0) == 1
    assert check_homogeneous(loss)


def test_check_homogeneous():
    assert check_homogeneous(zero_one_loss(FiniteDomain(2, 2)))
    assert not check_homogeneous(LossFunction(((0, 1), (0, 0))))
    assert check_homogeneous(LossFunction(((3,),)))


def test_generic_cost_examples():
    domain = FiniteDomain(3, 2)
    f = TargetFunction(domain, (0, 1, 1))
    d = Dataset(((0, 0),))
    loss = zero_one_loss(domain)
    assert generic_cost(f, StochasticHypothesis.from_function(f), d, blind(3), loss) == 0
    wrong = StochasticHypothesis.deterministic(domain, (1, 0, 0))
    assert generic_cost(f, wrong, d, blind(3), loss) == 1
    assert generic_cost(f, StochasticHypothesis.uniform(domain), d, blind(3), loss) == HALF


def test_ots_cost_examples():
    domain = FiniteDomain(5, 2)
    f = TargetFunction(domain, (0, 0, 0, 0, 0))
    d = Dataset(((0, 0), (1, 0), (2, 0)))
    pi = SamplingDistribution.uniform(5)
    loss = zero_one_loss(domain)
    assert ots_cost(f, StochasticHypothesis.deterministic(domain, (1, 1, 1, 1, 0)), d, pi, loss) == HALF
    assert ots_cost(f, StochasticHypothesis.deterministic(domain, (1, 1, 1, 0, 0)), d, pi, loss) == 0


def test_ots_cost_needs_an_off_training_point():
    domain = FiniteDomain(2, 2)
    f = TargetFunction(domain, (0, 1))
    d = Dataset(((0, 0), (1, 1)))
    with pytest.raises(EmptyOtsError):
        ots_cost(f, StochasticHypothesis.from_function(f), d, SamplingDistribution.uniform(2), zero_one_loss(domain))


@given(
    f_bits=st.lists(st.integers(0, 1), min_size=5, max_size=5),
    h_bits=st.lists(st.integers(0, 1), min_size=5, max_size=5),
    xs=st.lists(st.integers(0, 4), min_size=1, max_size=4),
)
def test_complement_costs_sum_to_one(f_bits, h_bits, xs):
    domain = FiniteDomain(5, 2)
    if len(set(xs)) == 5:
        return
    f = TargetFunction(domain, tuple(f_bits))
    d = Dataset(tuple((x, f(x)) for x in xs))
    pi = SamplingDistribution.uniform(5)
    loss = zero_one_loss(domain)
    h = StochasticHypothesis.deterministic(domain, h_bits)
    h_bar = StochasticHypothesis.deterministic(domain, [1 - b for b in h_bits])
    cost = ots_cost(f, h, d, pi, loss)
    assert 0 <= cost <= 1
    assert cost + ots_cost(f, h_bar, d, pi, loss) == 1


@given(
    a=st.lists(st.integers(0, 1), min_size=4, max_size=4),
    b=st.lists(st.integers(0, 1), min_size=4, max_size=4),
    num=st.integers(0, 7),
)
def test_generic_cost_is_linear_in_the_hypothesis(a, b, num):
    domain = FiniteDomain(4, 2)
    f = TargetFunction(domain, (0, 1, 1, 0))
    d = Dataset(((1, 1),))
    loss = zero_one_loss(domain)
    w = QueryWeighting(WeightingMode.OTS, SamplingDistribution((Fraction(1, 8), Fraction(1, 8),
                                                                 Fraction(1, 4), Fraction(1, 2))))
    alpha = Fraction(num, 7)
    h1 = StochasticHypothesis.deterministic(domain, a)
    h2 = StochasticHypothesis.deterministic(domain, b)
    mixed = generic_cost(f, h1.mix(h2, alpha), d, w, loss)
    assert mixed == alpha * generic_cost(f, h1, d, w, loss) + (1 - alpha) * generic_cost(f, h2, d, w, loss)


def test_realized_cost_atoms_of_a_coin_flip():
    domain = FiniteDomain(3, 2)
    f = TargetFunction(domain, (0, 0, 0))
    d = Dataset(((0, 0),))
    w = QueryWeighting(WeightingMode.OTS, SamplingDistribution.uniform(3))
    loss = zero_one_loss(domain)
    h = StochasticHypothesis.uniform(domain)
    assert cost_atoms(f, h, d, w, loss) == {HALF: 1}
    assert cost_atoms(f, h, d, w, loss, realize=True) == {0: Fraction(1, 4), HALF: HALF, 1: Fraction(1, 4)}


def test_empirical_cost_examples():
    domain = FiniteDomain(2, 2)
    f = TargetFunction(domain, (0, 1))
    pi = SamplingDistribution.uniform(2)
    loss = zero_one_loss(domain)
    h_zero = StochasticHypothesis.deterministic(domain, (0, 0))
    assert empirical_cost(f, constant_learner(h_zero), 1, pi, loss) == HALF
    assert empirical_cost(f, constant_learner(StochasticHypothesis.from_function(f)), 2, pi, loss) == 0
    h_bad = StochasticHypothesis.deterministic(domain, (1, 0))
    assert empirical_cost(f, constant_learner(h_bad), 2, pi, loss) == 1


def test_training_set_loss_counts_duplicates():
    domain = FiniteDomain(3, 2)
    f = TargetFunction(domain, (0, 1, 1))
    h = StochasticHypothesis.deterministic(domain, (0, 0, 0))
    d = Dataset(((1, 1), (1, 1), (0, 0)))
    assert training_set_loss(f, h, d, SamplingDistribution.uniform(3), zero_one_loss(domain)) == Fraction(2, 3)


def test_data_blind_cost_weights_by_pi():
    domain = FiniteDomain(2, 2)
    f = TargetFunction(domain, (0, 1))
    h = StochasticHypothesis.deterministic(domain, (0, 0))
    pi = SamplingDistribution((Fraction(1, 4), Fraction(3, 4)))
    assert data_blind_cost(f, h, pi, zero_one_loss(domain)) == Fraction(3, 4)
