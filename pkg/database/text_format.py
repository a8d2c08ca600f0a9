"""
Line-oriented text format for functions, datasets, priors, losses, sampling
distributions and payoff sequences

One record per line, comma-separated fields, rationals always "num/den".
Blank lines and lines starting with '#' are ignored. See docs/text_format.md.
"""
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from models.data_models import (
    Dataset, FiniteDomain, LossFunction, PayoffSequence, Prior,
    SamplingDistribution, TargetFunction
)
from models.errors import InvalidValueError, TextFormatError

PathLike = Union[str, Path]


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    if not sep:
        raise TextFormatError(f"rational {text!r} is not of the form num/den")
    try:
        value = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as e:
        raise TextFormatError(f"bad rational {text!r}") from e
    return value


def _records(lines: Iterable[str]):
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield line_no, line.split(",")


def _ints(fields: Sequence[str], line_no: int) -> List[int]:
    try:
        return [int(f) for f in fields]
    except ValueError as e:
        raise TextFormatError(f"expected integers, got {list(fields)}", line_no) from e


def _expect(tag: str, fields: List[str], line_no: int, min_fields: int):
    if fields[0] != tag:
        raise TextFormatError(f"expected a '{tag}' record, got '{fields[0]}'", line_no)
    if len(fields) < min_fields:
        raise TextFormatError(f"'{tag}' record needs at least {min_fields} fields", line_no)


# function,<x_size>,<y_size>,<f(0)>,...,<f(x_size-1)>
def function_line(f: TargetFunction) -> str:
    return ",".join(["function", str(f.domain.x_size), str(f.domain.y_size)] + [str(y) for y in f.outputs])


def parse_function(fields: List[str], line_no: int = None) -> TargetFunction:
    _expect("function", fields, line_no, 4)
    x_size, y_size, *outputs = _ints(fields[1:], line_no)
    try:
        return TargetFunction(FiniteDomain(x_size, y_size), tuple(outputs))
    except InvalidValueError as e:
        raise TextFormatError(str(e), line_no) from e


# dataset,<weight>,<x0>,<y0>,<x1>,<y1>,...
def dataset_line(d: Dataset) -> str:
    fields = ["dataset", format_rational(d.weight)]
    for x, y in d.pairs:
        fields += [str(x), str(y)]
    return ",".join(fields)


def parse_dataset(fields: List[str], line_no: int = None) -> Dataset:
    _expect("dataset", fields, line_no, 4)
    flat = _ints(fields[2:], line_no)
    if len(flat) % 2:
        raise TextFormatError("dataset pairs must come as x,y", line_no)
    try:
        return Dataset(tuple(zip(flat[0::2], flat[1::2])), parse_rational(fields[1]))
    except InvalidValueError as e:
        raise TextFormatError(str(e), line_no) from e


# prior,<weight>,<x_size>,<y_size>,<f(0)>,...   (one line per support function)
def prior_lines(prior: Prior) -> List[str]:
    return [f"prior,{format_rational(w)}," + function_line(f).split(",", 1)[1] for f, w in prior.items()]


def parse_prior(records) -> Prior:
    support, weights = [], []
    for line_no, fields in records:
        _expect("prior", fields, line_no, 5)
        weights.append(parse_rational(fields[1]))
        support.append(parse_function(["function"] + fields[2:], line_no))
    try:
        return Prior(tuple(support), tuple(weights))
    except InvalidValueError as e:
        raise TextFormatError(str(e)) from e


# loss,<L(y_h,0)>,...,<L(y_h,|Y|-1)>   (one line per y_h)
def loss_lines(loss: LossFunction) -> List[str]:
    return ["loss," + ",".join(format_rational(v) for v in row) for row in loss.table]


def parse_loss(records, name: str = "custom") -> LossFunction:
    rows = []
    for line_no, fields in records:
        _expect("loss", fields, line_no, 2)
        rows.append(tuple(parse_rational(v) for v in fields[1:]))
    try:
        return LossFunction(tuple(rows), name)
    except InvalidValueError as e:
        raise TextFormatError(str(e)) from e


# sampling,<pi(0)>,...,<pi(x_size-1)>
def sampling_line(pi: SamplingDistribution) -> str:
    return "sampling," + ",".join(format_rational(w) for w in pi.weights)


def parse_sampling(fields: List[str], line_no: int = None) -> SamplingDistribution:
    _expect("sampling", fields, line_no, 2)
    try:
        return SamplingDistribution(tuple(parse_rational(v) for v in fields[1:]))
    except InvalidValueError as e:
        raise TextFormatError(str(e), line_no) from e


def dumps_functions(functions: Iterable[TargetFunction]) -> str:
    return "".join(function_line(f) + "\n" for f in functions)


def loads_functions(text: str) -> List[TargetFunction]:
    return [parse_function(fields, line_no) for line_no, fields in _records(text.splitlines())]


def dumps_datasets(datasets: Iterable[Dataset]) -> str:
    return "".join(dataset_line(d) + "\n" for d in datasets)


def loads_datasets(text: str) -> List[Dataset]:
    return [parse_dataset(fields, line_no) for line_no, fields in _records(text.splitlines())]


def dumps_prior(prior: Prior) -> str:
    return "".join(line + "\n" for line in prior_lines(prior))


def loads_prior(text: str) -> Prior:
    return parse_prior(_records(text.splitlines()))


def dumps_loss(loss: LossFunction) -> str:
    return "".join(line + "\n" for line in loss_lines(loss))


def loads_loss(text: str, name: str = "custom") -> LossFunction:
    return parse_loss(_records(text.splitlines()), name)


def load_loss_file(path: PathLike) -> LossFunction:
    path = Path(path)
    return loads_loss(path.read_text(), name=f"file:{path.name}")


def loads_sampling(text: str) -> SamplingDistribution:
    records = list(_records(text.splitlines()))
    if len(records) != 1:
        raise TextFormatError(f"expected one sampling record, got {len(records)}")
    line_no, fields = records[0]
    return parse_sampling(fields, line_no)


# Payoff sequences: one line of 0/1 characters per sequence.
def dumps_sequences(sequences: Iterable[PayoffSequence]) -> str:
    return "".join(str(s) + "\n" for s in sequences)


def loads_sequences(text: str) -> List[PayoffSequence]:
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if set(line) - {"0", "1"}:
            raise TextFormatError(f"payoff sequence must be 0/1 characters, got {line!r}", line_no)
        out.append(PayoffSequence.from_string(line))
    return out


def save_sequences(path: PathLike, sequences: Iterable[PayoffSequence]):
    Path(path).write_text(dumps_sequences(sequences))


def load_sequences(path: PathLike) -> List[PayoffSequence]:
    return loads_sequences(Path(path).read_text())
