"""
Main entry point for the no-free-lunch verification lab
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from models.errors import LabError
from database.database_manager import RunLedger
from engine.learners import LEARNER_NAMES
from runner.config import EXPERIMENTS, parse_config
from runner.experiments import run_experiment
from runner.reports import print_bundle
from runner.verify import PROFILES, print_summary, verify_all

logger = logging.getLogger(__name__)

DEFAULT_LEDGER = Path("data") / "runs.db"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfl-lab",
        description="Exact no-free-lunch, cross-validation and expert-advice checks",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("--db", type=Path, default=DEFAULT_LEDGER, help="run ledger (SQLite)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment from a YAML config")
    run.add_argument("--config", type=Path, required=True)
    run.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)

    verify = sub.add_parser("verify-all", help="run the whole acceptance suite")
    verify.add_argument("--profile", choices=PROFILES, default="default")
    verify.add_argument("--out", type=Path, default=Path("reports") / "verify")
    verify.add_argument("--workers", type=int)

    sub.add_parser("list", help="print the experiment and learner registries")

    history = sub.add_parser("history", help="show recorded runs")
    history.add_argument("--run", type=int, help="show the verdicts of one run")
    history.add_argument("--limit", type=int, default=20)
    return parser


def _open_ledger(path: Path) -> RunLedger:
    path.parent.mkdir(parents=True, exist_ok=True)
    return RunLedger(str(path))


def cmd_run(args) -> int:
    overrides = {"output_dir": str(args.out) if args.out else None, "seed": args.seed, "workers": args.workers}
    config = parse_config(args.config, overrides)
    ledger = _open_ledger(args.db)
    try:
        bundle = run_experiment(config, ledger)
    finally:
        ledger.close()
    print_bundle(bundle)
    return 0 if bundle.passed else 1


def cmd_verify(args) -> int:
    ledger = _open_ledger(args.db)
    try:
        suite = verify_all(args.profile, args.out, args.workers, ledger)
    finally:
        ledger.close()
    print_summary(suite)
    for v in suite.verdicts:
        if v.failed:
            print(f"FAIL {v.check}: {v.value} {v.witness or ''} {v.detail}".rstrip())
    return 0 if suite.passed else 1


def cmd_list(args) -> int:
    print("Experiments:")
    for name in EXPERIMENTS:
        print(f"  {name}")
    print("Learners:")
    for name in LEARNER_NAMES:
        print(f"  {name}")
    return 0


def cmd_history(args) -> int:
    ledger = _open_ledger(args.db)
    try:
        if args.run is not None:
            verdicts = ledger.get_verdicts(args.run)
            if not verdicts:
                print(f"No verdicts recorded for run {args.run}")
            for v in verdicts:
                print(f"[{v.status}] {v.check} {v.value}".rstrip())
                if v.witness:
                    print(f"  witness: {v.witness}")
        else:
            runs = ledger.get_runs(args.limit)
            if not runs:
                print("No runs recorded")
            for r in runs:
                print(f"{r.run_id:>5} | {r.started_at} | {r.experiment:<18} | "
                      f"{'PASS' if r.passed else 'FAIL'} | {r.wall_seconds:.2f}s")
    finally:
        ledger.close()
    return 0


COMMANDS = {"run": cmd_run, "verify-all": cmd_verify, "list": cmd_list, "history": cmd_history}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except LabError as e:
        logger.error("%s", e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
