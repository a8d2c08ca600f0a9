"""
Learning algorithms: majority / anti-majority, constant and random-guess
learners, leave-one-out cross-validation and the cross-validation /
anti-cross-validation meta-learners
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from models.data_models import (
    ZERO, Dataset, FiniteDomain, LossFunction, StochasticHypothesis
)
from models.errors import InvalidValueError, NonBinaryError
from engine.costs import zero_one_loss

logger = logging.getLogger(__name__)

TIE_LABEL = 1


@dataclass(frozen=True)
class Learner:
    name: str
    rule: Callable[[Dataset, FiniteDomain], StochasticHypothesis]

    def train(self, d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        return self.rule(d, domain)

    def __str__(self) -> str:
        return self.name


class CvSelectionMode(Enum):
    MIN = "min"
    MAX = "max"


def _require_binary(domain: FiniteDomain, who: str):
    if not domain.is_binary:
        raise NonBinaryError(f"{who} needs a binary output space, got |Y|={domain.y_size}")


def majority_label(ys: Sequence[int]) -> int:
    """More common label in d_Y; ties go to TIE_LABEL"""
    ones = sum(ys)
    zeros = len(ys) - ones
    if ones == zeros:
        return TIE_LABEL
    return 1 if ones > zeros else 0


def _memorizing_hypothesis(d: Dataset, domain: FiniteDomain, ots_label: int) -> StochasticHypothesis:
    seen = d.memorized()
    return StochasticHypothesis.deterministic(domain, [seen.get(x, ots_label) for x in domain.inputs()])


def majority_learner() -> Learner:
    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        _require_binary(domain, "majority")
        return _memorizing_hypothesis(d, domain, majority_label(d.ys))
    return Learner("majority", rule)


def anti_majority_learner() -> Learner:
    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        _require_binary(domain, "anti-majority")
        return _memorizing_hypothesis(d, domain, 1 - majority_label(d.ys))
    return Learner("anti-majority", rule)


def constant_learner(h_star: StochasticHypothesis, name: Optional[str] = None) -> Learner:
    """Always returns h_star, whatever the data"""
    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        if domain != h_star.domain:
            raise InvalidValueError(f"constant hypothesis lives on {h_star.domain}, not {domain}")
        return h_star
    outputs = h_star.deterministic_outputs
    label = "".join(str(y) for y in outputs) if outputs is not None else "stochastic"
    return Learner(name or f"constant:{label}", rule)


def constant_hypothesis(pattern: str, domain: FiniteDomain) -> StochasticHypothesis:
    """
    A single digit predicts that label everywhere; a digit string gives the
    full output table.
    """
    if not pattern.isdigit():
        raise InvalidValueError(f"constant learner pattern must be digits, got {pattern!r}")
    values = [int(c) for c in pattern]
    outputs = values * domain.x_size if len(values) == 1 else values
    return StochasticHypothesis.deterministic(domain, outputs)


def constant_output_learner(pattern: str) -> Learner:
    """Registry form of the constant learner"""
    if not pattern.isdigit():
        raise InvalidValueError(f"constant learner pattern must be digits, got {pattern!r}")

    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        return constant_hypothesis(pattern, domain)
    return Learner(f"constant:{pattern}", rule)


def random_guess_learner() -> Learner:
    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        _require_binary(domain, "random")
        return StochasticHypothesis.uniform(domain)
    return Learner("random", rule)


def loo_cv_error(algo: Learner, d: Dataset, loss: LossFunction, domain: FiniteDomain) -> Fraction:
    """Leave-one-out error: mean loss on each held-out pair"""
    if d.m < 2:
        raise InvalidValueError(f"leave-one-out needs m >= 2, got m={d.m}")
    total = ZERO
    for i, (x, y) in enumerate(d.pairs):
        h = algo.train(d.without(i), domain)
        total += sum((p * loss(y_h, y) for y_h, p in h.support(x)), ZERO)
    return total / d.m


def cv_select(algos: Sequence[Learner], d: Dataset, domain: FiniteDomain, loss: LossFunction,
              mode: CvSelectionMode) -> int:
    """Index picked by cross-validation (MIN) or anti-cross-validation (MAX)"""
    if not algos:
        raise InvalidValueError("cross-validation needs at least one algorithm")
    errors = [loo_cv_error(a, d, loss, domain) for a in algos]
    target = min(errors) if mode is CvSelectionMode.MIN else max(errors)
    return errors.index(target)


def cv_meta(algos: Sequence[Learner], mode: CvSelectionMode, loss: Optional[LossFunction] = None) -> Learner:
    """Φ (mode=MIN) or ~Φ (mode=MAX) over algos; zero-one LOO loss unless given"""
    algos = tuple(algos)
    if not algos:
        raise InvalidValueError("cross-validation needs at least one algorithm")

    def rule(d: Dataset, domain: FiniteDomain) -> StochasticHypothesis:
        chosen = cv_select(algos, d, domain, loss or zero_one_loss(domain), mode)
        return algos[chosen].train(d, domain)

    name = f"cv:{mode.value}:" + ",".join(a.name for a in algos)
    return Learner(name, rule)


LEARNER_NAMES = [
    "majority", "anti-majority", "random", "constant:<digits>", "cv:min:<learner>,<learner>,...",
    "cv:max:<learner>,<learner>,...",
]

_SIMPLE = {
    "majority": majority_learner,
    "anti-majority": anti_majority_learner,
    "random": random_guess_learner,
}


def resolve_learner(name: str) -> Learner:
    """Build a learner from its registry name"""
    name = name.strip()
    if name in _SIMPLE:
        return _SIMPLE[name]()
    if name.startswith("constant:"):
        return constant_output_learner(name.split(":", 1)[1])
    if name.startswith("cv:"):
        parts = name.split(":", 2)
        if len(parts) != 3 or parts[1] not in ("min", "max") or not parts[2]:
            raise InvalidValueError(f"bad meta-learner name {name!r}; expected cv:min|max:<learners>")
        inner = [resolve_learner(n) for n in parts[2].split(",")]
        return cv_meta(inner, CvSelectionMode(parts[1]))
    raise InvalidValueError(f"unknown learner {name!r}")


def resolve_learners(names: Sequence[str]) -> List[Learner]:
    return [resolve_learner(n) for n in names]
