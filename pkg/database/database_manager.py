"""
Run ledger: SQLite archive of experiment runs and their verdicts
"""
import json
import logging
import sqlite3
from dataclasses import dataclass
from typing import List, Optional

from models.data_models import ReportBundle, Verdict

logger = logging.getLogger(__name__)


@dataclass
class RunRecord:
    run_id: int
    experiment: str
    started_at: str
    wall_seconds: float
    passed: bool
    config: str


@dataclass
class VerdictRecord:
    run_id: int
    check: str
    status: str
    value: str
    witness: str
    detail: str


class RunLedger:
    def __init__(self, db_file: str):
        self.db_file = db_file
        self.connection = None
        try:
            self.connection = sqlite3.connect(db_file)
            self._create_tables()
        except sqlite3.Error as e:
            logger.error("Ledger error: %s", e)
            self.connection = None

    def __del__(self):
        self.close()

    def close(self):
        if self.connection:
            self.connection.close()
            self.connection = None

    def _create_tables(self):
        self.connection.executescript("""
            CREATE TABLE IF NOT EXISTS Runs (
                RunID INTEGER PRIMARY KEY AUTOINCREMENT,
                Experiment TEXT NOT NULL,
                StartedAt TEXT NOT NULL,
                WallSeconds REAL NOT NULL,
                Passed INTEGER NOT NULL,
                Config TEXT NOT NULL
            );
            CREATE TABLE IF NOT EXISTS Verdicts (
                RunID INTEGER NOT NULL REFERENCES Runs(RunID),
                Seq INTEGER NOT NULL,
                CheckName TEXT NOT NULL,
                Status TEXT NOT NULL,
                Value TEXT,
                Witness TEXT,
                Detail TEXT
            );
        """)
        self.connection.commit()

    def record_run(self, bundle: ReportBundle) -> Optional[int]:
        """Store a finished run and its verdicts; returns the run id"""
        if not self.connection:
            return None

        meta = bundle.metadata
        try:
            cursor = self.connection.cursor()
            cursor.execute(
                "INSERT INTO Runs (Experiment, StartedAt, WallSeconds, Passed, Config) VALUES (?, ?, ?, ?, ?);",
                (bundle.experiment, str(meta.get("started_at", "")), float(meta.get("wall_seconds", 0.0)),
                 int(bundle.passed), json.dumps(meta.get("config", {}), sort_keys=True)),
            )
            run_id = cursor.lastrowid
            cursor.executemany(
                "INSERT INTO Verdicts (RunID, Seq, CheckName, Status, Value, Witness, Detail) "
                "VALUES (?, ?, ?, ?, ?, ?, ?);",
                [(run_id, i, v.check, v.status.value, v.value, v.witness or "", v.detail)
                 for i, v in enumerate(bundle.verdicts)],
            )
            self.connection.commit()
            return run_id
        except sqlite3.Error as e:
            logger.error("Error while recording run: %s", e)
            return None

    def get_runs(self, limit: int = 20) -> List[RunRecord]:
        runs = []
        if not self.connection:
            return runs

        sql = """
            SELECT RunID, Experiment, StartedAt, WallSeconds, Passed, Config
            FROM Runs ORDER BY RunID DESC LIMIT ?;
        """

        try:
            cursor = self.connection.cursor()
            cursor.execute(sql, (limit,))
            for row in cursor.fetchall():
                runs.append(RunRecord(
                    run_id=row[0],
                    experiment=row[1],
                    started_at=row[2],
                    wall_seconds=row[3],
                    passed=bool(row[4]),
                    config=row[5] if row[5] else "",
                ))
        except sqlite3.Error as e:
            logger.error("Error while fetching runs: %s", e)

        return runs

    def get_verdicts(self, run_id: int) -> List[VerdictRecord]:
        verdicts = []
        if not self.connection:
            return verdicts

        sql = """
            SELECT RunID, CheckName, Status, Value, Witness, Detail
            FROM Verdicts WHERE RunID = ? ORDER BY Seq;
        """

        try:
            cursor = self.connection.cursor()
            cursor.execute(sql, (run_id,))
            for row in cursor.fetchall():
                verdicts.append(VerdictRecord(
                    run_id=row[0],
                    check=row[1],
                    status=row[2],
                    value=row[3] if row[3] else "",
                    witness=row[4] if row[4] else "",
                    detail=row[5] if row[5] else "",
                ))
        except sqlite3.Error as e:
            logger.error("Error while fetching verdicts: %s", e)

        return verdicts
