from fractions import Fraction

import pytest

from models.data_models import (
    CostDistribution, Dataset, FiniteDomain, LossFunction, SamplingDistribution, StochasticHypothesis,
    TargetFunction
)
from models.errors import EmptyOtsError, InvalidValueError, NonBinaryError, NonHomogeneousLossError
from engine.costs import cyclic_loss, zero_one_loss
from engine.enumeration import two_constant_prior, uniform_prior_over_domain
from engine.learners import anti_majority_learner, majority_learner, resolve_learners
from engine.nfl_engine import (
    HALF, cost_distribution_given_f, expected_cost_given_d, expected_cost_given_m, f_averaged_distribution,
    joint_head_to_head,
    lln_convergence_experiment, nfl_f_average_check, nfl_uniform_prior_check, ots_vs_empirical_table,
    phi_sum_constant, prior_average_check, prior_witness_search
)

FIVE = ["majority", "anti-majority", "constant:0", "constant:1", "random"]


def uniform(x_size):
    return SamplingDistribution.uniform(x_size)


def test_cost_distribution_on_a_constant_target():
    domain = FiniteDomain(3, 2)
    f = TargetFunction(domain, (1, 1, 1))
    loss = zero_one_loss(domain)
    assert cost_distribution_given_f(majority_learner(), f, 1, uniform(3), loss) == CostDistribution.delta(0)
    assert cost_distribution_given_f(anti_majority_learner(), f, 1, uniform(3), loss) == CostDistribution.delta(1)


def test_f_average_is_learner_independent():
    domain = FiniteDomain(4, 2)
    report = nfl_f_average_check(resolve_learners(FIVE), domain, 1, uniform(4), zero_one_loss(domain))
    assert report.passed
    assert report.discrepancy is None
    assert all(d == report.distributions[0] for d in report.distributions)
    assert report.distributions[0].mean() == HALF


def test_f_average_with_distinct_sampling():
    domain = FiniteDomain(4, 2)
    report = nfl_f_average_check(resolve_learners(FIVE), domain, 3, uniform(4), zero_one_loss(domain),
                                 replacement=False)
    assert report.passed


def test_non_homogeneous_loss_needs_force():
    domain = FiniteDomain(3, 2)
    loss = LossFunction(((0, 1), (0, 0)), "lopsided")
    learners = resolve_learners(["constant:0", "constant:1"])
    with pytest.raises(NonHomogeneousLossError):
        nfl_f_average_check(learners, domain, 1, uniform(3), loss)
    report = nfl_f_average_check(learners, domain, 1, uniform(3), loss, force=True)
    assert not report.passed
    assert report.discrepancy is not None
    assert report.discrepancy.learner_b == "constant:1"


def test_uniform_prior_check_passes_for_a_fixed_dataset():
    domain = FiniteDomain(4, 2)
    d = Dataset(((0, 1), (1, 0)))
    report = nfl_uniform_prior_check(resolve_learners(FIVE), domain, d, zero_one_loss(domain))
    assert report.passed


def test_uniform_prior_check_rejects_a_covering_dataset():
    domain = FiniteDomain(2, 2)
    d = Dataset(((0, 0), (1, 1)))
    with pytest.raises(EmptyOtsError):
        nfl_uniform_prior_check(resolve_learners(["majority"]), domain, d, zero_one_loss(domain))


def test_expected_cost_given_d():
    domain = FiniteDomain(5, 2)
    loss = zero_one_loss(domain)
    d = Dataset(((0, 1), (1, 1), (2, 1)))
    assert expected_cost_given_d(majority_learner(), two_constant_prior(domain), d, loss) == 0
    assert expected_cost_given_d(anti_majority_learner(), two_constant_prior(domain), d, loss) == 1
    assert expected_cost_given_d(majority_learner(), uniform_prior_over_domain(domain), d, loss) == HALF


def test_expected_cost_given_m_under_the_uniform_prior():
    domain = FiniteDomain(3, 2)
    prior = uniform_prior_over_domain(domain)
    for learner in (majority_learner(), anti_majority_learner()):
        assert expected_cost_given_m(learner, prior, 1, uniform(3), zero_one_loss(domain)) == HALF


def test_prior_average_exact_branch():
    domain = FiniteDomain(3, 2)
    report = prior_average_check([majority_learner(), anti_majority_learner()], domain, 1, uniform(3),
                                 zero_one_loss(domain))
    assert report.exact_costs == (HALF, HALF)
    assert report.exact_equal
    assert report.mc_means == ()


def test_prior_average_monte_carlo_branch():
    domain = FiniteDomain(3, 2)
    report = prior_average_check([majority_learner(), anti_majority_learner()], domain, 1, uniform(3),
                                 zero_one_loss(domain), n_samples=50, seed=3)
    assert report.n_samples == 50
    assert len(report.mc_means) == 2
    assert all(0 <= v <= 1 for v in report.mc_means)
    assert set(report.win_fractions) == {(0, 1), (1, 0)}
    assert report.max_distribution_spread >= 0


def test_ots_cost_does_not_depend_on_empirical_cost():
    domain = FiniteDomain(4, 2)
    h_star = StochasticHypothesis.deterministic(domain, (0, 0, 0, 0))
    table = ots_vs_empirical_table(h_star, domain, 2, uniform(4), zero_one_loss(domain))
    assert set(table.expected_values()) == {HALF}
    assert sum(mass for _, mass in table.rows.values()) == 1
    assert set(table.rows) == {0, HALF, 1}


def test_lln_with_a_perfect_hypothesis():
    domain = FiniteDomain(100, 2)
    f = TargetFunction(domain, tuple(x % 2 for x in range(100)))
    report = lln_convergence_experiment(StochasticHypothesis.from_function(f), f, 10, uniform(100),
                                        zero_one_loss(domain), n_samples=50, seed=0)
    assert report.exact == 0
    assert report.gap == 0
    assert report.within_bound


def test_lln_needs_a_large_input_space():
    domain = FiniteDomain(50, 2)
    f = TargetFunction(domain, (0,) * 50)
    with pytest.raises(InvalidValueError):
        lln_convergence_experiment(StochasticHypothesis.from_function(f), f, 10, uniform(50),
                                   zero_one_loss(domain), n_samples=100, seed=0)


@pytest.mark.slow
def test_lln_at_acceptance_scale():
    domain = FiniteDomain(1000, 2)
    f = TargetFunction(domain, tuple(x % 2 for x in range(1000)))
    h_star = StochasticHypothesis.deterministic(domain, (0,) * 1000)
    report = lln_convergence_experiment(h_star, f, 100, uniform(1000), zero_one_loss(domain),
                                        n_samples=10000, seed=0)
    assert report.exact == HALF
    assert report.gap < 0.01


def test_complementary_learners_lie_on_the_unit_line():
    domain = FiniteDomain(3, 2)
    report = joint_head_to_head(majority_learner(), anti_majority_learner(), domain, 1, uniform(3),
                                zero_one_loss(domain))
    assert all(ca + cb == 1 for ca, cb in report.joint.atoms)


def test_a_learner_against_itself_is_symmetric():
    domain = FiniteDomain(3, 2)
    report = joint_head_to_head(majority_learner(), majority_learner(), domain, 1, uniform(3),
                                zero_one_loss(domain))
    assert all(ca == cb for ca, cb in report.joint.atoms)
    assert report.symmetric
    assert report.witness is None


def test_zero_one_head_to_head_is_symmetric_with_common_marginals():
    domain = FiniteDomain(4, 2)
    loss = zero_one_loss(domain)
    learners = resolve_learners(["majority", "constant:1", "cv:min:majority,anti-majority",
                                 "cv:max:majority,anti-majority"])
    common = f_averaged_distribution(learners[0], domain, 3, uniform(4), loss)
    for i, a in enumerate(learners):
        for b in learners[i + 1:]:
            report = joint_head_to_head(a, b, domain, 3, uniform(4), loss)
            assert report.marginal_a == common, (a.name, b.name)
            assert report.marginal_b == common, (a.name, b.name)
            assert report.symmetric, (a.name, b.name)


def test_head_to_head_with_every_training_set_excluded():
    domain = FiniteDomain(2, 2)
    pi = SamplingDistribution((1, 0))
    with pytest.raises(EmptyOtsError):
        joint_head_to_head(majority_learner(), anti_majority_learner(), domain, 1, pi, zero_one_loss(domain),
                           exclude_empty_ots=True)


def test_cyclic_loss_breaks_head_to_head_symmetry():
    domain = FiniteDomain(3, 3)
    a, b = resolve_learners(["constant:0", "constant:1"])
    report = joint_head_to_head(a, b, domain, 1, uniform(3), cyclic_loss(domain))
    assert not report.symmetric
    pair, p, q = report.witness
    assert p != q
    assert report.marginal_a == report.marginal_b


def test_vertex_prior_witness():
    domain = FiniteDomain(5, 2)
    witness = prior_witness_search(domain, 3, uniform(5), zero_one_loss(domain))
    assert witness.anti_cv_cost < HALF
    assert witness.anti_cv_cost + witness.cv_cost == 1
    assert witness.prior.weights == (Fraction(1),)


def test_phi_sum_constant():
    domain = FiniteDomain(5, 2)
    assert phi_sum_constant(domain, 3, uniform(5)) == 1


def test_phi_sum_preconditions():
    with pytest.raises(InvalidValueError):
        phi_sum_constant(FiniteDomain(5, 2), 2, uniform(5))
    with pytest.raises(NonBinaryError):
        phi_sum_constant(FiniteDomain(4, 3), 3, uniform(4))
