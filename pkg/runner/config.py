"""
Experiment configuration: YAML loading, per-experiment defaults and validation
"""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from models.data_models import ExperimentConfig, FiniteDomain, LossFunction, SamplingDistribution, to_rational
from models.errors import ConfigError, InvalidValueError, LabError
from database.text_format import load_loss_file
from engine.costs import cyclic_loss, zero_one_loss
from engine.enumeration import DEFAULT_ENUMERATION_CAP
from engine.learners import resolve_learner
from engine.olea import MAX_GAP_HORIZON
from engine.parallel import available_workers

logger = logging.getLogger(__name__)

EXPERIMENTS = [
    "nfl-f-average", "nfl-uniform-prior", "prior-average", "counterexample", "prior-witness",
    "head-to-head", "ots-vs-empirical", "lln", "olea-gap", "olea-embedding",
]

_CV_PAIR = ["majority", "anti-majority"]

# Values applied before the file's own keys. Anything not listed falls back to
# the ExperimentConfig field default.
DEFAULTS: Dict[str, Dict[str, Any]] = {
    "nfl-f-average": {"x_size": 4, "m": 1,
                      "learners": ["majority", "anti-majority", "constant:0", "constant:1", "random"]},
    "nfl-uniform-prior": {"x_size": 4, "m": 1, "learners": ["majority", "anti-majority", "constant:0"]},
    "prior-average": {"x_size": 4, "m": 1, "n_samples": 1000, "learners": ["majority", "anti-majority"]},
    "counterexample": {"x_size": 5, "m": 3, "sampling": "distinct", "learners": list(_CV_PAIR)},
    "prior-witness": {"x_size": 5, "m": 3, "sampling": "distinct", "learners": list(_CV_PAIR)},
    "head-to-head": {"x_size": 3, "y_size": 3, "m": 1, "loss": "cyclic",
                     "learners": ["constant:0", "constant:1", "constant:2"]},
    "ots-vs-empirical": {"x_size": 4, "m": 2, "learners": ["constant:0"]},
    "lln": {"x_size": 1000, "m": 100, "n_samples": 10000, "learners": ["constant:0"]},
    "olea-gap": {"horizon": 10},
    "olea-embedding": {"x_size": 4, "m": 3, "n_samples": 1000},
}

_INT_FIELDS = ["x_size", "y_size", "m", "horizon", "seed", "n_samples", "workers", "experts", "period"]
_BOOL_FIELDS = ["exclude_empty_ots", "force"]
_KNOWN_KEYS = set(_INT_FIELDS) | set(_BOOL_FIELDS) | {
    "experiment", "pi", "loss", "sampling", "learners", "eta", "output_dir", "sequences",
}
# Experiments that enumerate every target function on the domain
_ENUMERATING = {
    "nfl-f-average", "nfl-uniform-prior", "prior-average", "counterexample", "prior-witness",
    "head-to-head", "ots-vs-empirical",
}


def _key_lines(text: str) -> Dict[str, int]:
    """Top-level key -> 1-based line number, for diagnostics"""
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {k.value: k.start_mark.line + 1 for k, _ in node.value if isinstance(k, yaml.ScalarNode)}


def parse_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Load, default and validate one experiment config file"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {e}", line=mark.line + 1 if mark else None) from e
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of keys to values")
    data = dict(data)
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping(data, _key_lines(text), path.parent)


def config_from_mapping(data: Dict[str, Any], lines: Optional[Dict[str, int]] = None,
                        base_dir: Optional[Path] = None) -> ExperimentConfig:
    """Defaults and validation for an already-loaded mapping; lines feed the diagnostics"""
    lines = lines or {}
    base_dir = base_dir or Path(".")

    def fail(message: str, key: str):
        raise ConfigError(message, field=key, line=lines.get(key))

    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        fail(f"unknown key (known keys: {', '.join(sorted(_KNOWN_KEYS))})", unknown[0])
    name = data.get("experiment")
    if name not in EXPERIMENTS:
        fail(f"unknown experiment {name!r}; choose one of {', '.join(EXPERIMENTS)}", "experiment")

    values: Dict[str, Any] = {}
    values.update(DEFAULTS[name])
    values.update({k: v for k, v in data.items() if k != "sequences"})

    for key in _INT_FIELDS:
        if key in values and (isinstance(values[key], bool) or not isinstance(values[key], int)):
            fail(f"expected an integer, got {values[key]!r}", key)
    for key in _BOOL_FIELDS:
        if key in values and not isinstance(values[key], bool):
            fail(f"expected true or false, got {values[key]!r}", key)

    config = ExperimentConfig(experiment=name)
    for key, value in values.items():
        if key == "output_dir":
            value = Path(value)
        elif key == "eta":
            value = str(value)
        elif key == "pi" and isinstance(value, list):
            value = [str(v) for v in value]
        elif key == "learners":
            if isinstance(value, str):
                value = [value]
            if not isinstance(value, list):
                fail("expected a list of learner names", key)
            value = [str(v) for v in value]
        setattr(config, key, value)
    if "workers" not in values:
        config.workers = available_workers()
    if "sequences" in data:
        config.source = base_dir / str(data["sequences"])
    if isinstance(config.loss, str) and config.loss.startswith("file:"):
        config.loss = "file:" + str(base_dir / config.loss[len("file:"):])

    _validate(config, fail)
    logger.debug("config for %s: %s", name, dict(config.parameters()))
    return config


def _validate(config: ExperimentConfig, fail):
    name = config.experiment
    if config.x_size < 2 or config.y_size < 2:
        fail("domain sizes must be at least 2", "x_size" if config.x_size < 2 else "y_size")
    if config.m < 1:
        fail("m must be at least 1", "m")
    if config.sampling not in ("replacement", "distinct"):
        fail("sampling must be 'replacement' or 'distinct'", "sampling")
    if not config.replacement and config.m >= config.x_size:
        fail(f"distinct sampling needs m < |X| (m={config.m}, |X|={config.x_size})", "m")
    if config.workers < 1:
        fail("workers must be at least 1", "workers")
    if config.n_samples < 0:
        fail("n_samples must be nonnegative", "n_samples")

    for learner in config.learners:
        try:
            resolve_learner(learner)
        except LabError as e:
            fail(str(e), "learners")

    try:
        resolve_pi(config)
    except LabError as e:
        fail(str(e), "pi")
    try:
        loss = resolve_loss(config)
    except (LabError, OSError) as e:
        fail(str(e), "loss")
    if loss.y_size != config.y_size:
        fail(f"loss table is {loss.y_size}x{loss.y_size} but |Y|={config.y_size}", "loss")
    try:
        eta = resolve_eta(config)
    except LabError as e:
        fail(str(e), "eta")
    if eta <= 0:
        fail("eta must be positive", "eta")

    if name in _ENUMERATING:
        count = config.y_size ** config.x_size
        if count > DEFAULT_ENUMERATION_CAP:
            fail(f"{count} target functions exceed the enumeration budget of {DEFAULT_ENUMERATION_CAP}", "x_size")
        if not config.learners:
            fail("at least one learner is required", "learners")

    if name in ("counterexample", "prior-witness"):
        if config.y_size != 2:
            fail("the cross-validation counterexample needs |Y|=2", "y_size")
        if config.m % 2 == 0 or config.m < 3:
            fail(f"m must be odd and at least 3, got {config.m}", "m")
    if name in ("ots-vs-empirical", "lln"):
        if not config.learners or any(not l.startswith("constant:") for l in config.learners):
            fail("this experiment needs constant learners (constant:<digits>)", "learners")
    if name == "head-to-head" and len(config.learners) < 2:
        fail("head-to-head needs at least two learners", "learners")
    if name == "prior-witness" and config.y_size != 2:
        fail("the witness search needs |Y|=2", "y_size")
    if name == "lln":
        if config.x_size < 10 * config.m:
            fail(f"need |X| >= 10 m (|X|={config.x_size}, m={config.m})", "x_size")
        if config.n_samples < 2:
            fail("the LLN experiment needs n_samples >= 2", "n_samples")
    if name == "olea-gap":
        if config.horizon < 1:
            fail("horizon must be at least 1", "horizon")
        if config.experts < 2:
            fail("experts must be at least 2", "experts")
        if config.experts == 2 and config.horizon > MAX_GAP_HORIZON:
            fail(f"exhaustive gap tables stop at horizon {MAX_GAP_HORIZON}", "horizon")
        if config.experts > 2 and config.n_samples < 1:
            fail("more than two experts need sampled adversaries (n_samples >= 1)", "n_samples")
        if config.period < 1:
            fail("period must be at least 1", "period")
    if name == "olea-embedding":
        if config.y_size != 2:
            fail("the embedding needs |Y|=2", "y_size")
        if config.m != config.x_size - 1:
            fail(f"the embedding window is the training iterations plus the query: m must be {config.x_size - 1}",
                 "m")
        combos = (2 ** config.x_size) ** config.experts * 2 ** config.x_size
        if combos > DEFAULT_ENUMERATION_CAP:
            fail(f"{combos} embedded configurations exceed the enumeration budget", "x_size")


def resolve_pi(config: ExperimentConfig) -> SamplingDistribution:
    if config.pi == "uniform":
        return SamplingDistribution.uniform(config.x_size)
    if isinstance(config.pi, str):
        raise InvalidValueError(f"pi must be 'uniform' or a list of rationals, got {config.pi!r}")
    weights: List[Fraction] = [to_rational(p) for p in config.pi]
    if len(weights) != config.x_size:
        raise InvalidValueError(f"pi has {len(weights)} entries but |X|={config.x_size}")
    return SamplingDistribution(tuple(weights))


def resolve_loss(config: ExperimentConfig) -> LossFunction:
    domain = FiniteDomain(config.x_size, config.y_size)
    if config.loss == "zero-one":
        return zero_one_loss(domain)
    if config.loss == "cyclic":
        return cyclic_loss(domain)
    if config.loss.startswith("file:"):
        return load_loss_file(config.loss[len("file:"):])
    raise InvalidValueError(f"unknown loss {config.loss!r}; use zero-one, cyclic or file:<path>")


def resolve_eta(config: ExperimentConfig) -> Fraction:
    return to_rational(config.eta)
