"""
Data models for the no-free-lunch verification lab

Every probability and cost is a Fraction. Domain and report types are frozen;
the config and the report bundle are filled in as a run proceeds.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from models.errors import InvalidValueError

Rational = Fraction
RationalLike = Union[int, str, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ints, 'num/den' strings and Fractions; floats are refused"""
    if isinstance(value, float):
        raise InvalidValueError(f"refusing float {value!r}: use an exact 'num/den' rational")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise InvalidValueError(f"not a rational: {value!r}") from e


# ---------------------------------------------------------------------------
# Core domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteDomain:
    x_size: int
    y_size: int

    def __post_init__(self):
        # Experiments require sizes >= 2 (checked by the config layer); the
        # value type admits the degenerate single-input / single-output cases.
        if self.x_size < 1 or self.y_size < 1:
            raise InvalidValueError(f"domain sizes must be positive, got |X|={self.x_size}, |Y|={self.y_size}")

    @property
    def function_count(self) -> int:
        return self.y_size ** self.x_size

    @property
    def is_binary(self) -> bool:
        return self.y_size == 2

    def inputs(self) -> range:
        return range(self.x_size)

    def outputs(self) -> range:
        return range(self.y_size)


@dataclass(frozen=True)
class TargetFunction:
    domain: FiniteDomain
    outputs: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if len(self.outputs) != self.domain.x_size:
            raise InvalidValueError(f"function needs {self.domain.x_size} outputs, got {len(self.outputs)}")
        for y in self.outputs:
            if not 0 <= y < self.domain.y_size:
                raise InvalidValueError(f"output {y} outside [0, {self.domain.y_size})")

    def __call__(self, x: int) -> int:
        return self.outputs[x]

    def agrees_with(self, d: "Dataset") -> bool:
        return all(self.outputs[x] == y for x, y in d.pairs)

    def is_constant(self) -> bool:
        return len(set(self.outputs)) == 1

    def label(self) -> str:
        return "".join(str(y) for y in self.outputs)


@dataclass(frozen=True)
class StochasticHypothesis:
    domain: FiniteDomain
    per_query: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_rational(p) for p in row) for row in self.per_query)
        object.__setattr__(self, "per_query", rows)
        if len(rows) != self.domain.x_size:
            raise InvalidValueError(f"hypothesis needs {self.domain.x_size} query rows, got {len(rows)}")
        for x, row in enumerate(rows):
            if len(row) != self.domain.y_size:
                raise InvalidValueError(f"row {x} has {len(row)} entries, expected {self.domain.y_size}")
            if any(p < 0 for p in row) or sum(row) != 1:
                raise InvalidValueError(f"row {x} is not a distribution: {row}")

    @classmethod
    def deterministic(cls, domain: FiniteDomain, outputs: Sequence[int]) -> "StochasticHypothesis":
        if len(outputs) != domain.x_size:
            raise InvalidValueError(f"hypothesis needs {domain.x_size} outputs, got {len(outputs)}")
        rows = []
        for y in outputs:
            if not 0 <= y < domain.y_size:
                raise InvalidValueError(f"output {y} outside [0, {domain.y_size})")
            rows.append(tuple(ONE if v == y else ZERO for v in domain.outputs()))
        return cls(domain, tuple(rows))

    @classmethod
    def uniform(cls, domain: FiniteDomain) -> "StochasticHypothesis":
        row = tuple(Fraction(1, domain.y_size) for _ in domain.outputs())
        return cls(domain, tuple(row for _ in domain.inputs()))

    @classmethod
    def from_function(cls, f: TargetFunction) -> "StochasticHypothesis":
        return cls.deterministic(f.domain, f.outputs)

    def prob(self, x: int, y: int) -> Fraction:
        return self.per_query[x][y]

    def support(self, x: int) -> List[Tuple[int, Fraction]]:
        return [(y, p) for y, p in enumerate(self.per_query[x]) if p > 0]

    @property
    def deterministic_outputs(self) -> Optional[Tuple[int, ...]]:
        """Point predictions when every row is a delta, else None"""
        outs = []
        for row in self.per_query:
            hits = [y for y, p in enumerate(row) if p == 1]
            if not hits:
                return None
            outs.append(hits[0])
        return tuple(outs)

    @property
    def is_deterministic(self) -> bool:
        return self.deterministic_outputs is not None

    def mix(self, other: "StochasticHypothesis", alpha: Fraction) -> "StochasticHypothesis":
        """alpha * self + (1 - alpha) * other, query by query"""
        alpha = to_rational(alpha)
        rows = tuple(
            tuple(alpha * a + (1 - alpha) * b for a, b in zip(ra, rb))
            for ra, rb in zip(self.per_query, other.per_query)
        )
        return StochasticHypothesis(self.domain, rows)


@dataclass(frozen=True)
class Dataset:
    pairs: Tuple[Tuple[int, int], ...]
    weight: Fraction = ONE

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(x), int(y)) for x, y in self.pairs))
        object.__setattr__(self, "weight", to_rational(self.weight))
        if not self.pairs:
            raise InvalidValueError("a dataset needs at least one pair")
        if not ZERO < self.weight <= ONE:
            raise InvalidValueError(f"dataset weight {self.weight} outside (0, 1]")

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def xs(self) -> Tuple[int, ...]:
        return tuple(x for x, _ in self.pairs)

    @property
    def ys(self) -> Tuple[int, ...]:
        return tuple(y for _, y in self.pairs)

    @property
    def x_set(self) -> frozenset:
        return frozenset(self.xs)

    def without(self, i: int) -> "Dataset":
        """The dataset with pair i held out"""
        return Dataset(self.pairs[:i] + self.pairs[i + 1:], self.weight)

    def memorized(self) -> Dict[int, int]:
        """x -> y with the latest pair winning on duplicate inputs"""
        return {x: y for x, y in self.pairs}


@dataclass(frozen=True)
class Prior:
    support: Tuple[TargetFunction, ...]
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "weights", tuple(to_rational(w) for w in self.weights))
        if not self.support:
            raise InvalidValueError("a prior needs a nonempty support")
        if len(self.support) != len(self.weights):
            raise InvalidValueError("prior support and weights differ in length")
        if any(w < 0 for w in self.weights):
            raise InvalidValueError("prior weights must be nonnegative")
        if sum(self.weights) != 1:
            raise InvalidValueError(f"prior weights sum to {sum(self.weights)}, not 1")
        if len({f.outputs for f in self.support}) != len(self.support):
            raise InvalidValueError("prior support entries must be distinct")

    @property
    def domain(self) -> FiniteDomain:
        return self.support[0].domain

    def items(self) -> Iterator[Tuple[TargetFunction, Fraction]]:
        return iter(zip(self.support, self.weights))


@dataclass(frozen=True)
class SamplingDistribution:
    weights: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(to_rational(w) for w in self.weights))
        if not self.weights:
            raise InvalidValueError("sampling distribution is empty")
        if any(w < 0 for w in self.weights):
            raise InvalidValueError("sampling weights must be nonnegative")
        if sum(self.weights) != 1:
            raise InvalidValueError(f"sampling weights sum to {sum(self.weights)}, not 1")

    @classmethod
    def uniform(cls, x_size: int) -> "SamplingDistribution":
        return cls(tuple(Fraction(1, x_size) for _ in range(x_size)))

    def __getitem__(self, x: int) -> Fraction:
        return self.weights[x]

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def support(self) -> List[int]:
        return [x for x, w in enumerate(self.weights) if w > 0]


# ---------------------------------------------------------------------------
# Costs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LossFunction:
    table: Tuple[Tuple[Fraction, ...], ...]
    name: str = "custom"

    def __post_init__(self):
        rows = tuple(tuple(to_rational(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", rows)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise InvalidValueError("loss table must be a nonempty square matrix")
        if any(v < 0 for row in rows for v in row):
            raise InvalidValueError("loss values must be nonnegative")

    @property
    def y_size(self) -> int:
        return len(self.table)

    def __call__(self, y_h: int, y_f: int) -> Fraction:
        return self.table[y_h][y_f]


class WeightingMode(Enum):
    DATA_BLIND = "data-blind"
    OTS = "ots"


@dataclass(frozen=True)
class QueryWeighting:
    mode: WeightingMode
    pi: SamplingDistribution


@dataclass(frozen=True)
class CostDistribution:
    atoms: Dict[Fraction, Fraction]

    def __post_init__(self):
        atoms = {to_rational(c): to_rational(p) for c, p in self.atoms.items() if p != 0}
        if any(p < 0 for p in atoms.values()):
            raise InvalidValueError("cost probabilities must be nonnegative")
        if sum(atoms.values()) != 1:
            raise InvalidValueError(f"cost distribution sums to {sum(atoms.values())}, not 1")
        object.__setattr__(self, "atoms", dict(sorted(atoms.items())))

    @classmethod
    def delta(cls, cost: RationalLike) -> "CostDistribution":
        return cls({to_rational(cost): ONE})

    def __getitem__(self, cost: Fraction) -> Fraction:
        return self.atoms.get(cost, ZERO)

    def mean(self) -> Fraction:
        return sum((c * p for c, p in self.atoms.items()), ZERO)

    def first_difference(self, other: "CostDistribution") -> Optional[Tuple[Fraction, Fraction, Fraction]]:
        """Lowest cost atom where the two distributions disagree"""
        for cost in sorted(set(self.atoms) | set(other.atoms)):
            if self[cost] != other[cost]:
                return cost, self[cost], other[cost]
        return None


@dataclass(frozen=True)
class JointCostDistribution:
    atoms: Dict[Tuple[Fraction, Fraction], Fraction]

    def __post_init__(self):
        atoms = {(to_rational(a), to_rational(b)): to_rational(p)
                 for (a, b), p in self.atoms.items() if p != 0}
        if sum(atoms.values()) != 1:
            raise InvalidValueError(f"joint distribution sums to {sum(atoms.values())}, not 1")
        object.__setattr__(self, "atoms", dict(sorted(atoms.items())))

    def __getitem__(self, pair: Tuple[Fraction, Fraction]) -> Fraction:
        return self.atoms.get(pair, ZERO)

    def marginal(self, axis: int) -> CostDistribution:
        acc: Dict[Fraction, Fraction] = {}
        for pair, p in self.atoms.items():
            acc[pair[axis]] = acc.get(pair[axis], ZERO) + p
        return CostDistribution(acc)

    def swapped(self) -> "JointCostDistribution":
        return JointCostDistribution({(b, a): p for (a, b), p in self.atoms.items()})

    def first_difference(self, other: "JointCostDistribution"):
        for pair in sorted(set(self.atoms) | set(other.atoms)):
            if self[pair] != other[pair]:
                return pair, self[pair], other[pair]
        return None


# ---------------------------------------------------------------------------
# NFL engine reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Discrepancy:
    cost: Fraction
    learner_a: str
    prob_a: Fraction
    learner_b: str
    prob_b: Fraction

    def describe(self) -> str:
        return (f"cost {self.cost}: P={self.prob_a} under {self.learner_a} "
                f"vs P={self.prob_b} under {self.learner_b}")


@dataclass(frozen=True)
class NflReport:
    learner_names: Tuple[str, ...]
    distributions: Tuple[CostDistribution, ...]
    passed: bool
    discrepancy: Optional[Discrepancy] = None


@dataclass(frozen=True)
class PriorWitness:
    prior: Prior
    anti_cv_cost: Fraction
    cv_cost: Fraction

    @property
    def function(self) -> TargetFunction:
        return self.prior.support[0]


@dataclass(frozen=True)
class ConditionalTable:
    rows: Dict[Fraction, Tuple[Fraction, Fraction]]

    def __post_init__(self):
        total = sum((mass for _, mass in self.rows.values()), ZERO)
        if total != 1:
            raise InvalidValueError(f"conditional table masses sum to {total}, not 1")
        object.__setattr__(self, "rows", dict(sorted(self.rows.items())))

    def expected_values(self) -> List[Fraction]:
        return [expected for expected, _ in self.rows.values()]


@dataclass(frozen=True)
class PriorAverageReport:
    learner_names: Tuple[str, ...]
    exact_costs: Tuple[Fraction, ...]
    exact_equal: bool
    n_samples: int
    mc_means: Tuple[float, ...] = ()
    mc_stds: Tuple[float, ...] = ()
    # (i, j) -> fraction of sampled priors where learner i is strictly better than j
    win_fractions: Dict[Tuple[int, int], float] = field(default_factory=dict)
    max_distribution_spread: float = 0.0


@dataclass(frozen=True)
class LlnReport:
    estimate: float
    standard_error: float
    exact: Fraction
    gap: float
    n_samples: int

    @property
    def within_bound(self) -> bool:
        return self.gap <= 3 * self.standard_error


@dataclass(frozen=True)
class HeadToHeadReport:
    learner_a: str
    learner_b: str
    joint: JointCostDistribution
    swapped: JointCostDistribution
    symmetric: bool
    witness: Optional[Tuple[Tuple[Fraction, Fraction], Fraction, Fraction]] = None

    @property
    def marginal_a(self) -> CostDistribution:
        return self.joint.marginal(0)

    @property
    def marginal_b(self) -> CostDistribution:
        return self.joint.marginal(1)


# ---------------------------------------------------------------------------
# Online learning under expert advice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PayoffSequence:
    values: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if any(v not in (0, 1) for v in self.values):
            raise InvalidValueError(f"payoffs must be bits, got {self.values}")

    @classmethod
    def from_string(cls, bits: str) -> "PayoffSequence":
        return cls(tuple(int(c) for c in bits.strip()))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __str__(self) -> str:
        return "".join(str(v) for v in self.values)


@dataclass(frozen=True)
class LeaderBoard:
    # accumulated[k][i] = payoff of sequence k over its first i iterations; i = 0..n
    accumulated: Tuple[Tuple[int, ...], ...]
    leaders: Tuple[int, ...]
    laggards: Tuple[int, ...]

    def best(self, i: int) -> int:
        return self.accumulated[self.leaders[i]][i]

    def gap(self, i: int) -> int:
        return self.best(i) - self.accumulated[self.laggards[i]][i]


@dataclass(frozen=True)
class StrategyTrace:
    name: str
    # entry i describes iteration i + 1
    choices: Tuple[int, ...]
    payoffs: Tuple[Fraction, ...]
    regret: Tuple[Fraction, ...]

    @property
    def total_payoff(self) -> Fraction:
        return sum(self.payoffs, ZERO)

    @property
    def max_regret(self) -> Fraction:
        return max(self.regret)


@dataclass(frozen=True)
class GapRow:
    gap: int
    max_final_regret: int
    max_running_regret: int
    count_pairs: int
    half_zero_regret_pairs: int = 0


@dataclass(frozen=True)
class SupervisedEmbedding:
    domain: FiniteDomain
    # training-window values of each considered function g_k
    considered: Tuple[Tuple[int, ...], ...]
    dataset: Dataset
    query: int

    def complete(self, next_values: Sequence[int]) -> Tuple[TargetFunction, ...]:
        """Fix g_k at the query point and return the full considered functions"""
        if len(next_values) != len(self.considered):
            raise InvalidValueError("one query value per considered function is required")
        return tuple(TargetFunction(self.domain, g + (int(v),)) for g, v in zip(self.considered, next_values))


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

class VerdictStatus(Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INFO = "INFO"


@dataclass(frozen=True)
class Verdict:
    check: str
    status: VerdictStatus
    value: str = ""
    witness: Optional[str] = None
    detail: str = ""
    parameters: Tuple[Tuple[str, str], ...] = ()

    @property
    def failed(self) -> bool:
        return self.status is VerdictStatus.FAIL


@dataclass
class ExperimentConfig:
    experiment: str
    x_size: int = 5
    y_size: int = 2
    m: int = 3
    pi: Union[str, List[str]] = "uniform"
    loss: str = "zero-one"
    sampling: str = "replacement"
    learners: List[str] = field(default_factory=list)
    horizon: int = 10
    eta: str = "1"
    seed: int = 0
    n_samples: int = 0
    output_dir: Path = Path("reports")
    workers: int = 1
    experts: int = 2
    period: int = 1
    exclude_empty_ots: bool = False
    force: bool = False
    source: Optional[Path] = None

    @property
    def domain(self) -> FiniteDomain:
        return FiniteDomain(self.x_size, self.y_size)

    @property
    def replacement(self) -> bool:
        return self.sampling == "replacement"

    def parameters(self) -> Tuple[Tuple[str, str], ...]:
        """Config echo used in verdict records (no output paths, no worker count)"""
        pi = self.pi if isinstance(self.pi, str) else ",".join(str(p) for p in self.pi)
        return (
            ("x_size", str(self.x_size)), ("y_size", str(self.y_size)), ("m", str(self.m)),
            ("pi", pi), ("loss", self.loss), ("sampling", self.sampling),
            ("learners", ",".join(self.learners)), ("horizon", str(self.horizon)),
            ("eta", str(self.eta)), ("seed", str(self.seed)), ("n_samples", str(self.n_samples)),
            ("experts", str(self.experts)),
        )


@dataclass
class ReportBundle:
    experiment: str
    verdicts: List[Verdict] = field(default_factory=list)
    csv_paths: List[Path] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(v.failed for v in self.verdicts)
