"""
Exception hierarchy for the verification lab
"""
from typing import Optional


class LabError(Exception):
    """Base class for every error raised by the lab"""


class InvalidValueError(LabError, ValueError):
    """A value violates the invariants of its type"""


class BudgetExceededError(LabError):
    """An enumeration would exceed the configured budget"""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} items exceeds the enumeration budget of {cap}")
        self.what = what
        self.count = count
        self.cap = cap


class EmptyOtsError(LabError):
    """The off-training-set region carries no sampling mass"""


class NoConsistentFunctionError(LabError):
    """No support function of a prior agrees with the training set"""


class NonBinaryError(LabError):
    """An operation that needs a binary output space got something else"""


class NonHomogeneousLossError(LabError):
    """The NFL f-average theorem does not apply to the given loss"""


class NoWitnessError(LabError):
    """The vertex-prior scan found no witness (contradicts the NFL average)"""


class SumIdentityError(LabError):
    """The cross-validation / anti-cross-validation cost sum is not constant"""

    def __init__(self, values: dict):
        rendered = ", ".join(f"{v} ({len(pairs)} pairs)" for v, pairs in sorted(values.items()))
        super().__init__(f"sum of selected-algorithm costs is not constant: {rendered}")
        self.values = values


class TextFormatError(LabError):
    """A line of the text format could not be parsed"""

    def __init__(self, message: str, line_no: Optional[int] = None):
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}")
        self.line_no = line_no


class ConfigError(LabError):
    """An experiment config is malformed or out of budget"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        prefix = ""
        if field:
            prefix += f"field '{field}'"
        if line is not None:
            prefix += f" (line {line})"
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.field = field
        self.line = line


class ExperimentError(LabError):
    """An engine error raised while running a named experiment"""

    def __init__(self, experiment: str, cause: Exception):
        super().__init__(f"experiment '{experiment}' failed: {cause}")
        self.experiment = experiment
        self.cause = cause
