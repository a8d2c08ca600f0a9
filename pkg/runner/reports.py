"""
Report emission: CSV artifacts, verdict records and run metadata
"""
import csv
import json
import logging
import platform
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import yaml

from models.data_models import CostDistribution, ExperimentConfig, ReportBundle, Verdict, VerdictStatus
from database.text_format import format_rational

logger = logging.getLogger(__name__)

VERDICTS_FILE = "verdicts.jsonl"
METADATA_FILE = "run.json"


def render(value: Any) -> str:
    """CSV cell text; rationals always num/den"""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def render_distribution(dist: CostDistribution) -> str:
    return " ".join(f"{format_rational(c)}:{format_rational(p)}" for c, p in dist.atoms.items())


def render_pairs(pairs) -> str:
    return " ".join(f"{x}:{y}" for x, y in pairs)


class ReportWriter:
    """Writes the CSV artifacts of one run into its output directory"""

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.paths: List[Path] = []

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.output_dir / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            count = 0
            for row in rows:
                writer.writerow([render(v) for v in row])
                count += 1
        logger.info("wrote %s (%d rows)", path, count)
        self.paths.append(path)
        return path

    def write_distributions(self, name: str, names: Sequence[str], dists: Sequence[CostDistribution]) -> Path:
        rows = [(n, c, p) for n, dist in zip(names, dists) for c, p in dist.atoms.items()]
        return self.write_csv(name, ["learner", "cost", "probability"], rows)


def verdict_record(verdict: Verdict) -> Dict[str, Any]:
    return {
        "check": verdict.check,
        "status": verdict.status.value,
        "value": verdict.value,
        "witness": verdict.witness,
        "detail": verdict.detail,
        "parameters": dict(verdict.parameters),
    }


def write_verdicts(output_dir: Path, verdicts: Sequence[Verdict]) -> Path:
    path = Path(output_dir) / VERDICTS_FILE
    with open(path, "w", encoding="utf-8") as f:
        for v in verdicts:
            f.write(json.dumps(verdict_record(v), sort_keys=True) + "\n")
    return path


def versions() -> Dict[str, str]:
    return {"python": platform.python_version(), "numpy": np.__version__, "pyyaml": yaml.__version__}


def run_metadata(config: ExperimentConfig, started_at: str, wall_seconds: float) -> Dict[str, Any]:
    return {
        "experiment": config.experiment,
        "config": dict(config.parameters()),
        "workers": config.workers,
        "started_at": started_at,
        "wall_seconds": round(wall_seconds, 3),
        "versions": versions(),
    }


def write_metadata(output_dir: Path, bundle: ReportBundle) -> Path:
    path = Path(output_dir) / METADATA_FILE
    meta = dict(bundle.metadata)
    meta["csv"] = [str(p) for p in bundle.csv_paths]
    meta["passed"] = bundle.passed
    with open(path, "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
    return path


def print_bundle(bundle: ReportBundle):
    """Print the verdicts of a run"""
    print(f"\n{bundle.experiment}")
    print("=" * 41)
    for v in bundle.verdicts:
        print(f"[{v.status.value}] {v.check}", end="")
        if v.value:
            print(f" = {v.value}", end="")
        print()
        if v.witness:
            print(f"  witness: {v.witness}")
        if v.detail:
            print(f"  {v.detail}")
    failed = sum(1 for v in bundle.verdicts if v.status is VerdictStatus.FAIL)
    wall = bundle.metadata.get("wall_seconds")
    print(f"\n{len(bundle.verdicts)} verdicts, {failed} failed"
          + (f" in {wall:.2f}s" if isinstance(wall, float) else ""))
    print("=" * 41)
