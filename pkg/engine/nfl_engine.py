"""
Exhaustive, exact computation of the extended-Bayesian-framework conditionals
and the no-free-lunch / free-lunch checks built on them
"""
import logging
from collections import defaultdict
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.data_models import (
    ONE, ZERO, ConditionalTable, CostDistribution, Dataset, Discrepancy,
    FiniteDomain, HeadToHeadReport, JointCostDistribution, LlnReport,
    LossFunction, NflReport, Prior, PriorAverageReport, PriorWitness,
    QueryWeighting, SamplingDistribution, StochasticHypothesis, TargetFunction,
    WeightingMode
)
from models.errors import (
    EmptyOtsError, InvalidValueError, NonBinaryError, NonHomogeneousLossError,
    NoWitnessError, SumIdentityError
)
from engine.costs import (
    check_homogeneous, cost_atoms, data_blind_cost, generic_cost, ots_cost,
    training_set_loss, zero_one_loss
)
from engine.enumeration import (
    DEFAULT_ENUMERATION_CAP, delta_prior, enumerate_functions,
    enumerate_training_sets, posterior_over_functions, sample_random_priors,
    uniform_prior_over_domain
)
from engine.learners import (
    CvSelectionMode, Learner, anti_majority_learner, cv_meta, cv_select,
    majority_learner
)
from engine.parallel import parallel_map

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _weighting(pi: SamplingDistribution, ots: bool) -> QueryWeighting:
    return QueryWeighting(WeightingMode.OTS if ots else WeightingMode.DATA_BLIND, pi)


def _average(dists: Sequence[Dict]) -> Dict:
    """Uniform average of atom maps, accumulated in the given order"""
    acc: Dict = defaultdict(Fraction)
    n = len(dists)
    for dist in dists:
        for atom, p in dist.items():
            acc[atom] += p / n
    return dict(acc)


def _compare(names: Sequence[str], dists: Sequence[CostDistribution]) -> Tuple[bool, Optional[Discrepancy]]:
    for name, dist in zip(names[1:], dists[1:]):
        diff = dists[0].first_difference(dist)
        if diff is not None:
            cost, p_a, p_b = diff
            return False, Discrepancy(cost, names[0], p_a, name, p_b)
    return True, None


def cost_distribution_given_f(learner: Learner, f: TargetFunction, m: int, pi: SamplingDistribution,
                              loss: LossFunction, ots: bool = True, replacement: bool = True,
                              exclude_empty_ots: bool = False, realize: bool = False,
                              cap: int = DEFAULT_ENUMERATION_CAP) -> CostDistribution:
    """
    P(C | f, m): the cost over every training set of size m, each weighted by
    its generation probability.

    Datasets whose inputs leave no off-training mass abort the computation
    unless exclude_empty_ots is set, in which case they are dropped and the
    remaining mass is renormalized.
    """
    w = _weighting(pi, ots)
    acc: Dict[Fraction, Fraction] = defaultdict(Fraction)
    skipped = ZERO
    for d in enumerate_training_sets(f, m, pi, replacement, cap):
        h = learner.train(d, f.domain)
        try:
            atoms = cost_atoms(f, h, d, w, loss, realize)
        except EmptyOtsError:
            if not exclude_empty_ots:
                raise
            skipped += d.weight
            continue
        for cost, p in atoms.items():
            acc[cost] += d.weight * p
    if skipped:
        kept = ONE - skipped
        if kept == 0:
            raise EmptyOtsError(f"every training set of size {m} covers the sampled inputs")
        logger.debug("excluded empty-OTS datasets with mass %s", skipped)
        acc = {c: p / kept for c, p in acc.items()}
    return CostDistribution(dict(acc))


def f_averaged_distribution(learner: Learner, domain: FiniteDomain, m: int, pi: SamplingDistribution,
                            loss: LossFunction, replacement: bool = True, exclude_empty_ots: bool = False,
                            realize: bool = True, workers: int = 1,
                            cap: int = DEFAULT_ENUMERATION_CAP) -> CostDistribution:
    """(1/|F|) Σ_f P(C_OTS | f, m)"""
    functions = list(enumerate_functions(domain, cap))

    def per_function(f: TargetFunction) -> Dict[Fraction, Fraction]:
        return cost_distribution_given_f(learner, f, m, pi, loss, True, replacement,
                                         exclude_empty_ots, realize, cap).atoms

    return CostDistribution(_average(parallel_map(per_function, functions, workers)))


def nfl_f_average_check(learners: Sequence[Learner], domain: FiniteDomain, m: int, pi: SamplingDistribution,
                        loss: LossFunction, force: bool = False, replacement: bool = True,
                        exclude_empty_ots: bool = False, workers: int = 1,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> NflReport:
    """Σ_f P(C_OTS | f, m) must be the same for every learner"""
    if not check_homogeneous(loss):
        if not force:
            raise NonHomogeneousLossError(f"loss '{loss.name}' is not homogeneous; pass force to run anyway")
        logger.warning("running the f-average check with non-homogeneous loss '%s'", loss.name)
    names = tuple(l.name for l in learners)
    dists = tuple(
        f_averaged_distribution(l, domain, m, pi, loss, replacement, exclude_empty_ots, True, workers, cap)
        for l in learners
    )
    passed, discrepancy = _compare(names, dists)
    logger.info("f-average NFL on |X|=%d, m=%d over %s: %s", domain.x_size, m, ", ".join(names),
                "PASS" if passed else "FAIL")
    return NflReport(names, dists, passed, discrepancy)


def nfl_uniform_prior_check(learners: Sequence[Learner], domain: FiniteDomain, d: Dataset, loss: LossFunction,
                            pi: Optional[SamplingDistribution] = None,
                            cap: int = DEFAULT_ENUMERATION_CAP) -> NflReport:
    """With uniform P(f), P(C_OTS | d) must be the same for every learner"""
    pi = pi or SamplingDistribution.uniform(domain.x_size)
    w = _weighting(pi, True)
    posterior = posterior_over_functions(uniform_prior_over_domain(domain, cap), d)
    names = tuple(l.name for l in learners)
    dists = []
    for learner in learners:
        h = learner.train(d, domain)
        acc: Dict[Fraction, Fraction] = defaultdict(Fraction)
        for f, p_f in posterior.items():
            for cost, p in cost_atoms(f, h, d, w, loss, realize=True).items():
                acc[cost] += p_f * p
        dists.append(CostDistribution(dict(acc)))
    passed, discrepancy = _compare(names, dists)
    return NflReport(names, tuple(dists), passed, discrepancy)


def expected_cost_given_d(learner: Learner, prior: Prior, d: Dataset, loss: LossFunction, ots: bool = True,
                          pi: Optional[SamplingDistribution] = None) -> Fraction:
    """E(C | d) = Σ_f P(f | d) C(f, h(d), d)"""
    domain = prior.domain
    pi = pi or SamplingDistribution.uniform(domain.x_size)
    posterior = posterior_over_functions(prior, d)
    h = learner.train(d, domain)
    w = _weighting(pi, ots)
    return sum((p_f * generic_cost(f, h, d, w, loss) for f, p_f in posterior.items()), ZERO)


def expected_cost_given_m(learner: Learner, prior: Prior, m: int, pi: SamplingDistribution, loss: LossFunction,
                          ots: bool = True, replacement: bool = True,
                          cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """E(C | m) = Σ_f P(f) E(C | f, m)"""
    return sum(
        (p_f * cost_distribution_given_f(learner, f, m, pi, loss, ots, replacement, cap=cap).mean()
         for f, p_f in prior.items() if p_f > 0),
        ZERO,
    )


def expected_ots_cost_fixed_inputs(learner: Learner, domain: FiniteDomain, d_x: Sequence[int],
                                   loss: LossFunction, pi: Optional[SamplingDistribution] = None,
                                   cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """Uniform-f average of the OTS cost when the training inputs are fixed"""
    pi = pi or SamplingDistribution.uniform(domain.x_size)
    functions = list(enumerate_functions(domain, cap))
    total = ZERO
    for f in functions:
        d = Dataset(tuple((x, f(x)) for x in d_x))
        total += ots_cost(f, learner.train(d, domain), d, pi, loss)
    return total / len(functions)


def prior_average_check(learners: Sequence[Learner], domain: FiniteDomain, m: int, pi: SamplingDistribution,
                        loss: LossFunction, n_samples: int = 0, seed: int = 0, replacement: bool = True,
                        exclude_empty_ots: bool = False,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> PriorAverageReport:
    """
    Compare learners averaged over priors P(f).

    The expected OTS cost is linear in P(f), so its average over the flat
    Dirichlet equals its value at the barycenter (the uniform prior); that is
    the exact branch. The Monte Carlo branch samples priors and reports
    per-learner means, spreads, pairwise win fractions and how far apart the
    prior-averaged cost distributions are.
    """
    functions = list(enumerate_functions(domain, cap))
    names = tuple(l.name for l in learners)
    per_f_dists = [
        [cost_distribution_given_f(l, f, m, pi, loss, True, replacement, exclude_empty_ots, True, cap)
         for f in functions]
        for l in learners
    ]
    per_f_costs = [[dist.mean() for dist in row] for row in per_f_dists]
    exact = tuple(sum(row, ZERO) / len(functions) for row in per_f_costs)
    exact_equal = len(set(exact)) == 1
    logger.info("prior-average exact branch: %s", ", ".join(f"{n}={c}" for n, c in zip(names, exact)))
    if n_samples <= 0:
        return PriorAverageReport(names, exact, exact_equal, 0)

    expected = np.zeros((n_samples, len(learners)))
    weights = np.zeros((n_samples, len(functions)))
    for s, prior in enumerate(sample_random_priors(domain, n_samples, seed, cap)):
        weights[s] = [float(w) for w in prior.weights]
        for i, row in enumerate(per_f_costs):
            expected[s, i] = float(sum((w * c for w, c in zip(prior.weights, row)), ZERO))

    wins = {}
    for i in range(len(learners)):
        for j in range(len(learners)):
            if i != j:
                wins[(i, j)] = float(np.mean(expected[:, i] < expected[:, j]))

    atoms = sorted({c for row in per_f_dists for dist in row for c in dist.atoms})
    mean_weights = weights.mean(axis=0)
    mixtures = []
    for row in per_f_dists:
        table = np.array([[float(dist[c]) for c in atoms] for dist in row])
        mixtures.append(mean_weights @ table)
    spread = max(float(np.max(np.abs(mix - mixtures[0]))) for mix in mixtures)

    return PriorAverageReport(
        names, exact, exact_equal, n_samples,
        tuple(float(v) for v in expected.mean(axis=0)),
        tuple(float(v) for v in expected.std(axis=0)),
        wins, spread,
    )


def ots_vs_empirical_table(h_star: StochasticHypothesis, domain: FiniteDomain, m: int,
                           pi: SamplingDistribution, loss: LossFunction, replacement: bool = True,
                           cap: int = DEFAULT_ENUMERATION_CAP) -> ConditionalTable:
    """E(C_OTS | m, Ĉ) for the constant learner h_star under uniform f"""
    functions = list(enumerate_functions(domain, cap))
    n = len(functions)
    mass: Dict[Fraction, Fraction] = defaultdict(Fraction)
    weighted: Dict[Fraction, Fraction] = defaultdict(Fraction)
    for f in functions:
        for d in enumerate_training_sets(f, m, pi, replacement, cap):
            c_hat = training_set_loss(f, h_star, d, pi, loss)
            p = d.weight / n
            mass[c_hat] += p
            weighted[c_hat] += p * ots_cost(f, h_star, d, pi, loss)
    return ConditionalTable({c: (weighted[c] / mass[c], mass[c]) for c in mass})


def lln_convergence_experiment(h_star: StochasticHypothesis, f: TargetFunction, m: int,
                               pi: SamplingDistribution, loss: LossFunction, n_samples: int,
                               seed: int) -> LlnReport:
    """Monte Carlo estimate of Ĉ(f, m) against the exact data-blind C(f, h*)"""
    domain = f.domain
    if domain.x_size < 10 * m:
        raise InvalidValueError(f"need |X| >= 10 m for the large-|X| regime (|X|={domain.x_size}, m={m})")
    if n_samples < 2:
        raise InvalidValueError("the LLN experiment needs at least 2 samples")
    exact = data_blind_cost(f, h_star, pi, loss)

    per_x_loss = np.array([
        float(sum((p * loss(y_h, f(x)) for y_h, p in h_star.support(x)), ZERO)) for x in domain.inputs()
    ])
    p = np.array([float(w) for w in pi.weights])
    rng = np.random.default_rng(seed)
    idx = rng.choice(domain.x_size, size=(n_samples, m), p=p / p.sum())
    samples = (p[idx] * per_x_loss[idx]).sum(axis=1) / p[idx].sum(axis=1)

    estimate = float(samples.mean())
    se = float(samples.std(ddof=1) / np.sqrt(n_samples))
    gap = abs(estimate - float(exact))
    logger.info("LLN: Ĉ≈%.6f ± %.6f, C=%s, gap=%.6f", estimate, se, exact, gap)
    return LlnReport(estimate, se, exact, gap, n_samples)


def joint_head_to_head(learner_a: Learner, learner_b: Learner, domain: FiniteDomain, m: int,
                       pi: SamplingDistribution, loss: LossFunction, replacement: bool = True,
                       exclude_empty_ots: bool = False, workers: int = 1,
                       cap: int = DEFAULT_ENUMERATION_CAP) -> HeadToHeadReport:
    """Σ_f P(C_A, C_B | f, m) / |F| and its swap (A and B drawn independently)"""
    functions = list(enumerate_functions(domain, cap))
    w = _weighting(pi, True)

    def per_function(f: TargetFunction):
        acc: Dict[Tuple[Fraction, Fraction], Fraction] = defaultdict(Fraction)
        skipped = ZERO
        for d in enumerate_training_sets(f, m, pi, replacement, cap):
            try:
                atoms_a = cost_atoms(f, learner_a.train(d, domain), d, w, loss, realize=True)
                atoms_b = cost_atoms(f, learner_b.train(d, domain), d, w, loss, realize=True)
            except EmptyOtsError:
                if not exclude_empty_ots:
                    raise
                skipped += d.weight
                continue
            for ca, pa in atoms_a.items():
                for cb, pb in atoms_b.items():
                    acc[(ca, cb)] += d.weight * pa * pb
        if skipped:
            kept = ONE - skipped
            if kept == 0:
                raise EmptyOtsError(f"every training set of size {m} covers the sampled inputs")
            acc = {k: p / kept for k, p in acc.items()}
        return dict(acc)

    joint = JointCostDistribution(_average(parallel_map(per_function, functions, workers)))
    swapped = joint.swapped()
    witness = joint.first_difference(swapped)
    return HeadToHeadReport(learner_a.name, learner_b.name, joint, swapped, witness is None, witness)


def _counterexample_preconditions(domain: FiniteDomain, m: int):
    if not domain.is_binary:
        raise NonBinaryError(f"the cross-validation counterexample needs |Y|=2, got {domain.y_size}")
    if m % 2 == 0:
        raise InvalidValueError(f"the cross-validation counterexample needs odd m, got {m}")


def cv_pair() -> List[Learner]:
    return [majority_learner(), anti_majority_learner()]


def prior_witness_search(domain: FiniteDomain, m: int, pi: SamplingDistribution, loss: LossFunction,
                         replacement: bool = False, cap: int = DEFAULT_ENUMERATION_CAP) -> PriorWitness:
    """First vertex prior (lexicographic f) on which anti-cross-validation beats 1/2"""
    _counterexample_preconditions(domain, m)
    algos = cv_pair()
    anti_cv = cv_meta(algos, CvSelectionMode.MAX)
    cv = cv_meta(algos, CvSelectionMode.MIN)
    for f in enumerate_functions(domain, cap):
        anti_cost = cost_distribution_given_f(anti_cv, f, m, pi, loss, True, replacement, cap=cap).mean()
        if anti_cost < HALF:
            cv_cost = cost_distribution_given_f(cv, f, m, pi, loss, True, replacement, cap=cap).mean()
            logger.info("witness f=%s: anti-CV %s, CV %s", f.label(), anti_cost, cv_cost)
            return PriorWitness(delta_prior(f), anti_cost, cv_cost)
    raise NoWitnessError(f"no vertex prior with anti-cross-validation cost < 1/2 on |X|={domain.x_size}, m={m}")


def phi_sum_profile(domain: FiniteDomain, m: int, pi: SamplingDistribution, loss: LossFunction,
                    replacement: bool = False, workers: int = 1,
                    cap: int = DEFAULT_ENUMERATION_CAP) -> Dict[Fraction, List[Tuple[str, tuple]]]:
    """
    Sum of the OTS costs of the Φ and ~Φ selections for every (f, d) where
    the two select different algorithms, grouped by value.
    """
    _counterexample_preconditions(domain, m)
    algos = cv_pair()
    functions = list(enumerate_functions(domain, cap))

    def per_function(f: TargetFunction):
        found = []
        for d in enumerate_training_sets(f, m, pi, replacement, cap):
            lo = cv_select(algos, d, domain, loss, CvSelectionMode.MIN)
            hi = cv_select(algos, d, domain, loss, CvSelectionMode.MAX)
            if lo == hi:
                continue
            total = (ots_cost(f, algos[lo].train(d, domain), d, pi, loss)
                     + ots_cost(f, algos[hi].train(d, domain), d, pi, loss))
            found.append((total, f.label(), d.pairs))
        return found

    values: Dict[Fraction, List[Tuple[str, tuple]]] = defaultdict(list)
    for found in parallel_map(per_function, functions, workers):
        for total, label, pairs in found:
            values[total].append((label, pairs))
    return dict(values)


def phi_sum_constant(domain: FiniteDomain, m: int, pi: SamplingDistribution,
                     loss: Optional[LossFunction] = None, replacement: bool = False, workers: int = 1,
                     cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """The common value of E_Φ(C_OTS|f,d) + E_~Φ(C_OTS|f,d) over differing selections"""
    values = phi_sum_profile(domain, m, pi, loss or zero_one_loss(domain), replacement, workers, cap)
    if not values:
        raise InvalidValueError("Φ and ~Φ never select different algorithms; the sum identity is vacuous")
    if len(values) > 1:
        raise SumIdentityError(values)
    (value,) = values
    logger.info("Φ/~Φ cost sum is constant: %s over %d (f, d) pairs", value, len(values[value]))
    return value
