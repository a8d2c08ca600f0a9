"""
The acceptance suite: every check at acceptance scale, in one run
"""
import logging
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from models.data_models import ReportBundle, VerdictStatus
from models.errors import ConfigError
from database.database_manager import RunLedger
from runner.config import config_from_mapping
from runner.experiments import run_experiment
from runner.reports import ReportWriter, versions, write_metadata, write_verdicts

logger = logging.getLogger(__name__)

PROFILES = ["default", "small"]

_FIVE = ["majority", "anti-majority", "constant:0", "constant:1", "random"]


def acceptance_steps(profile: str) -> List[Tuple[str, Dict[str, Any]]]:
    """(label, config mapping) for every acceptance step of a profile"""
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}; choose one of {', '.join(PROFILES)}")
    small = profile == "small"
    x_cv = 4 if small else 5
    steps = [
        ("nfl-f-average-m1", {"experiment": "nfl-f-average", "x_size": 4 if small else 5, "m": 1,
                              "learners": _FIVE}),
        ("nfl-f-average-m3", {"experiment": "nfl-f-average", "x_size": 4 if small else 5, "m": 3,
                              "learners": _FIVE}),
        ("nfl-uniform-prior-m1", {"experiment": "nfl-uniform-prior", "x_size": 3 if small else 4, "m": 1,
                                  "learners": _FIVE}),
        ("nfl-uniform-prior-m3", {"experiment": "nfl-uniform-prior", "x_size": 3 if small else 4, "m": 3,
                                  "learners": _FIVE, "exclude_empty_ots": True}),
        ("prior-average", {"experiment": "prior-average", "x_size": 3 if small else 4, "m": 1,
                           "n_samples": 1000}),
        ("counterexample", {"experiment": "counterexample", "x_size": x_cv, "m": 3}),
        ("prior-witness", {"experiment": "prior-witness", "x_size": x_cv, "m": 3}),
        ("ots-vs-empirical", {"experiment": "ots-vs-empirical", "x_size": 4 if small else 5,
                              "m": 2 if small else 3, "learners": ["constant:0", "constant:1"]}),
    ]
    for seed in (0, 1, 2):
        steps.append((f"lln-seed{seed}", {
            "experiment": "lln", "x_size": 200 if small else 1000, "m": 20 if small else 100,
            "n_samples": 2000 if small else 10000, "seed": seed,
        }))
    steps += [
        ("olea-gap", {"experiment": "olea-gap", "horizon": 8 if small else 10}),
        ("olea-embedding", {"experiment": "olea-embedding", "x_size": 3 if small else 4, "m": 2 if small else 3,
                            "n_samples": 1000}),
        ("head-to-head", {"experiment": "head-to-head"}),
    ]
    return steps


def verify_all(profile: str = "default", output_dir: Path = Path("reports/verify"),
               workers: Optional[int] = None, ledger: Optional[RunLedger] = None) -> ReportBundle:
    """Run the acceptance suite; failures are verdicts, never exceptions"""
    output_dir = Path(output_dir)
    started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    t0 = time.perf_counter()
    suite = ReportBundle(f"verify-all:{profile}")
    timings: Dict[str, float] = {}
    for label, mapping in acceptance_steps(profile):
        mapping = dict(mapping, output_dir=str(output_dir / label))
        if workers is not None:
            mapping["workers"] = workers
        config = config_from_mapping(mapping)
        step_start = time.perf_counter()
        bundle = run_experiment(config, ledger)
        timings[label] = round(time.perf_counter() - step_start, 3)
        logger.info("%s: %s in %.2fs", label, "PASS" if bundle.passed else "FAIL", timings[label])
        suite.verdicts.extend(replace(v, check=f"{label}/{v.check}") for v in bundle.verdicts)
        suite.csv_paths.extend(bundle.csv_paths)

    writer = ReportWriter(output_dir)
    writer.write_csv("summary", ["check", "status", "value"],
                     [(v.check, v.status.value, v.value) for v in suite.verdicts])
    suite.csv_paths.extend(writer.paths)
    suite.metadata = {
        "experiment": suite.experiment,
        "started_at": started_at,
        "wall_seconds": round(time.perf_counter() - t0, 3),
        "timings": timings,
        "versions": versions(),
    }
    write_verdicts(output_dir, suite.verdicts)
    write_metadata(output_dir, suite)
    return suite


def print_summary(suite: ReportBundle):
    """Per-step PASS/FAIL table with runtimes"""
    timings = suite.metadata.get("timings", {})
    steps: Dict[str, List[VerdictStatus]] = {}
    for v in suite.verdicts:
        steps.setdefault(v.check.split("/", 1)[0], []).append(v.status)
    print(f"\n{suite.experiment}")
    print("=" * 41)
    for label, statuses in steps.items():
        status = "FAIL" if VerdictStatus.FAIL in statuses else "PASS"
        print(f"{label:<24} {status:<5} {timings.get(label, 0.0):8.2f}s")
    print("=" * 41)
    print(f"{'total':<24} {'PASS' if suite.passed else 'FAIL':<5} {suite.metadata.get('wall_seconds', 0.0):8.2f}s")
