"""
Exact enumeration over finite input/output spaces: target functions, training
sets, posteriors and random priors
"""
import itertools
import logging
from fractions import Fraction
from typing import Iterator, List, Optional

import numpy as np

from models.data_models import (
    ONE, ZERO, Dataset, FiniteDomain, Prior, SamplingDistribution, TargetFunction
)
from models.errors import (
    BudgetExceededError, InvalidValueError, NoConsistentFunctionError
)

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 2 ** 20

# Random prior weights are rounded to multiples of 1 / PRIOR_QUANTUM before
# renormalization.
PRIOR_QUANTUM = 2 ** 32


def check_budget(what: str, count: int, cap: int = DEFAULT_ENUMERATION_CAP):
    if count > cap:
        raise BudgetExceededError(what, count, cap)


def enumerate_functions(domain: FiniteDomain, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[TargetFunction]:
    """All |Y|^|X| target functions, lexicographic in their outputs"""
    check_budget(f"functions on |X|={domain.x_size}, |Y|={domain.y_size}", domain.function_count, cap)
    for outputs in itertools.product(domain.outputs(), repeat=domain.x_size):
        yield TargetFunction(domain, outputs)


def constant_function(domain: FiniteDomain, value: int) -> TargetFunction:
    return TargetFunction(domain, (value,) * domain.x_size)


def _check_sampling(pi: SamplingDistribution, x_size: int):
    if len(pi) != x_size:
        raise InvalidValueError(f"sampling distribution has {len(pi)} entries for |X|={x_size}")


def enumerate_input_sequences(x_size: int, m: int, pi: SamplingDistribution, replacement: bool = True,
                              cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple]:
    """Every d_X with nonzero probability, as (sequence, weight)"""
    _check_sampling(pi, x_size)
    if m < 1:
        raise InvalidValueError(f"training set size must be >= 1, got {m}")
    support = pi.support

    if replacement:
        check_budget(f"training inputs ({len(support)}^{m})", len(support) ** m, cap)
        for xs in itertools.product(support, repeat=m):
            weight = ONE
            for x in xs:
                weight *= pi[x]
            yield xs, weight
        return

    if m >= x_size:
        raise InvalidValueError(f"sampling without replacement needs m < |X| (m={m}, |X|={x_size})")
    if m > len(support):
        raise InvalidValueError(f"only {len(support)} inputs have positive mass; cannot draw {m} distinct ones")
    count = 1
    for k in range(m):
        count *= len(support) - k
    check_budget(f"distinct training inputs ({count})", count, cap)

    sequences = []
    total = ZERO
    for xs in itertools.permutations(support, m):
        weight = ONE
        for x in xs:
            weight *= pi[x]
        sequences.append((xs, weight))
        total += weight
    for xs, weight in sequences:
        yield xs, weight / total


def enumerate_training_sets(f: TargetFunction, m: int, pi: SamplingDistribution, replacement: bool = True,
                            cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Dataset]:
    """Every noise-free training set of size m drawn from pi, weighted by P(d_X)"""
    for xs, weight in enumerate_input_sequences(f.domain.x_size, m, pi, replacement, cap):
        yield Dataset(tuple((x, f(x)) for x in xs), weight)


def enumerate_labelled_datasets(domain: FiniteDomain, m: int, replacement: bool = True,
                                cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Dataset]:
    """Every (d_X, d_Y) of size m that some target function could produce"""
    pi = SamplingDistribution.uniform(domain.x_size)
    check_budget("labelled datasets", domain.x_size ** m * domain.y_size ** m, cap)
    for xs, weight in enumerate_input_sequences(domain.x_size, m, pi, replacement, cap):
        for ys in itertools.product(domain.outputs(), repeat=m):
            seen = {}
            if all(seen.setdefault(x, y) == y for x, y in zip(xs, ys)):
                yield Dataset(tuple(zip(xs, ys)), ONE)


def uniform_prior(functions: List[TargetFunction]) -> Prior:
    n = len(functions)
    return Prior(tuple(functions), tuple(Fraction(1, n) for _ in functions))


def uniform_prior_over_domain(domain: FiniteDomain, cap: int = DEFAULT_ENUMERATION_CAP) -> Prior:
    return uniform_prior(list(enumerate_functions(domain, cap)))


def delta_prior(f: TargetFunction) -> Prior:
    return Prior((f,), (ONE,))


def two_constant_prior(domain: FiniteDomain) -> Prior:
    """Uniform over the all-0 and all-1 functions"""
    return uniform_prior([constant_function(domain, 0), constant_function(domain, 1)])


def posterior_over_functions(prior: Prior, d: Dataset) -> Prior:
    """P(f | d) for a noise-free vertical likelihood"""
    kept = [(f, w) for f, w in prior.items() if w > 0 and f.agrees_with(d)]
    mass = sum((w for _, w in kept), ZERO)
    if mass == 0:
        raise NoConsistentFunctionError(f"no support function agrees with d = {d.pairs}")
    return Prior(tuple(f for f, _ in kept), tuple(w / mass for _, w in kept))


def quantize_weights(raw: np.ndarray, quantum: int = PRIOR_QUANTUM) -> List[Fraction]:
    """Round float weights to multiples of 1/quantum, then renormalize exactly"""
    counts = [int(round(float(w) * quantum)) for w in raw]
    total = sum(counts)
    if total == 0:
        raise InvalidValueError("all quantized prior weights are zero")
    return [Fraction(c, total) for c in counts]


def sample_random_prior(domain: FiniteDomain, seed: int, cap: int = DEFAULT_ENUMERATION_CAP,
                        rng: Optional[np.random.Generator] = None) -> Prior:
    """Draw P(f) from the flat Dirichlet over all target functions"""
    functions = list(enumerate_functions(domain, cap))
    if rng is None:
        rng = np.random.default_rng(seed)
    raw = rng.dirichlet(np.ones(len(functions)))
    return Prior(tuple(functions), tuple(quantize_weights(raw)))


def sample_random_priors(domain: FiniteDomain, n_samples: int, seed: int,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Prior]:
    """n_samples priors from one seeded stream"""
    rng = np.random.default_rng(seed)
    for _ in range(n_samples):
        yield sample_random_prior(domain, seed, cap, rng=rng)
