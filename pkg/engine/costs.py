"""
Loss functions, the generic cost functional, off-training-set cost and the
empirical cost
"""
import logging
from collections import Counter, defaultdict
from fractions import Fraction
from typing import Dict, TYPE_CHECKING

from models.data_models import (
    ONE, ZERO, Dataset, FiniteDomain, LossFunction, QueryWeighting,
    SamplingDistribution, StochasticHypothesis, TargetFunction, WeightingMode
)
from models.errors import EmptyOtsError, InvalidValueError
from engine.enumeration import DEFAULT_ENUMERATION_CAP, enumerate_training_sets

if TYPE_CHECKING:
    from engine.learners import Learner

logger = logging.getLogger(__name__)


def zero_one_loss(domain: FiniteDomain) -> LossFunction:
    n = domain.y_size
    return LossFunction(tuple(tuple(ZERO if a == b else ONE for b in range(n)) for a in range(n)), "zero-one")


def cyclic_loss(domain: FiniteDomain) -> LossFunction:
    """L(y_h, y_f) = (y_f - y_h) mod |Y|: homogeneous, not symmetric for |Y| > 2"""
    n = domain.y_size
    return LossFunction(tuple(tuple(Fraction((b - a) % n) for b in range(n)) for a in range(n)), "cyclic")


def check_homogeneous(loss: LossFunction) -> bool:
    """Every cost value is hit by the same number of true outputs in every row"""
    rows = [Counter(row) for row in loss.table]
    return all(row == rows[0] for row in rows)


def _check_loss(loss: LossFunction, domain: FiniteDomain):
    if loss.y_size != domain.y_size:
        raise InvalidValueError(f"loss is {loss.y_size}x{loss.y_size} but |Y|={domain.y_size}")


def query_weights(w: QueryWeighting, d: Dataset, domain: FiniteDomain) -> Dict[int, Fraction]:
    """Normalized P_{d_X}(q) over queries with positive weight"""
    if len(w.pi) != domain.x_size:
        raise InvalidValueError(f"sampling distribution has {len(w.pi)} entries for |X|={domain.x_size}")
    if w.mode is WeightingMode.OTS:
        excluded = d.x_set
        raw = {q: w.pi[q] for q in domain.inputs() if q not in excluded and w.pi[q] > 0}
        if not raw:
            raise EmptyOtsError(f"no off-training input with positive mass for d_X = {d.xs}")
    else:
        raw = {q: w.pi[q] for q in domain.inputs() if w.pi[q] > 0}
    total = sum(raw.values())
    return {q: p / total for q, p in raw.items()}


def _expected_query_loss(f: TargetFunction, h: StochasticHypothesis, q: int, loss: LossFunction) -> Fraction:
    return sum((p * loss(y_h, f(q)) for y_h, p in h.support(q)), ZERO)


def generic_cost(f: TargetFunction, h: StochasticHypothesis, d: Dataset, w: QueryWeighting,
                 loss: LossFunction) -> Fraction:
    """Normalized Σ_q w(q) Σ_{y_h} h(y_h|q) L(y_h, f(q))"""
    _check_loss(loss, f.domain)
    weights = query_weights(w, d, f.domain)
    return sum((wq * _expected_query_loss(f, h, q, loss) for q, wq in weights.items()), ZERO)


def ots_cost(f: TargetFunction, h: StochasticHypothesis, d: Dataset, pi: SamplingDistribution,
             loss: LossFunction) -> Fraction:
    return generic_cost(f, h, d, QueryWeighting(WeightingMode.OTS, pi), loss)


def data_blind_cost(f: TargetFunction, h: StochasticHypothesis, pi: SamplingDistribution,
                    loss: LossFunction) -> Fraction:
    """C(f, h) = Σ_x π(x) E_h L(h(x), f(x))"""
    _check_loss(loss, f.domain)
    return sum((pi[x] * _expected_query_loss(f, h, x, loss) for x in f.domain.inputs()), ZERO)


def cost_atoms(f: TargetFunction, h: StochasticHypothesis, d: Dataset, w: QueryWeighting,
               loss: LossFunction, realize: bool = False) -> Dict[Fraction, Fraction]:
    """
    Distribution of the cost of h on (f, d).

    With realize=False this is a single atom at generic_cost. With realize=True
    a stochastic hypothesis is read as a distribution over deterministic
    hypotheses drawn independently at each query, and the returned atoms are
    the exact convolution of the per-query contributions.
    """
    if not realize or h.is_deterministic:
        return {generic_cost(f, h, d, w, loss): ONE}
    _check_loss(loss, f.domain)
    dist: Dict[Fraction, Fraction] = {ZERO: ONE}
    for q, wq in query_weights(w, d, f.domain).items():
        step: Dict[Fraction, Fraction] = defaultdict(Fraction)
        for cost, p in dist.items():
            for y_h, ph in h.support(q):
                step[cost + wq * loss(y_h, f(q))] += p * ph
        dist = dict(step)
    return dist


def training_set_loss(f: TargetFunction, h: StochasticHypothesis, d: Dataset, pi: SamplingDistribution,
                      loss: LossFunction) -> Fraction:
    """π-weighted average loss over d_X, duplicates counted with multiplicity"""
    num = ZERO
    den = ZERO
    for x in d.xs:
        num += pi[x] * _expected_query_loss(f, h, x, loss)
        den += pi[x]
    if den == 0:
        raise InvalidValueError(f"training inputs {d.xs} carry no sampling mass")
    return num / den


def empirical_cost(f: TargetFunction, learner: "Learner", m: int, pi: SamplingDistribution,
                   loss: LossFunction, replacement: bool = True,
                   cap: int = DEFAULT_ENUMERATION_CAP) -> Fraction:
    """Ĉ(f, m): expected on-training-set cost of the learner's hypothesis"""
    _check_loss(loss, f.domain)
    total = ZERO
    for d in enumerate_training_sets(f, m, pi, replacement, cap):
        h = learner.train(d, f.domain)
        total += d.weight * training_set_loss(f, h, d, pi, loss)
    return total
