import json

import pytest

from main import main


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "counterexample" in out
    assert "anti-majority" in out


def test_run_and_history(tmp_path, capsys):
    config = tmp_path / "counterexample.yaml"
    config.write_text("experiment: counterexample\nx_size: 4\nm: 3\nworkers: 1\n")
    db = tmp_path / "ledger" / "runs.db"
    out = tmp_path / "reports"
    assert main(["--db", str(db), "run", "--config", str(config), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "[PASS] counterexample-anti-cv = 1/1" in printed
    assert (out / "verdicts.jsonl").exists()
    assert json.loads((out / "run.json").read_text())["passed"] is True

    assert main(["--db", str(db), "history"]) == 0
    assert "counterexample" in capsys.readouterr().out
    assert main(["--db", str(db), "history", "--run", "1"]) == 0
    assert "phi-sum-constant" in capsys.readouterr().out


def test_bad_config_exits_with_two(tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("experiment: counterexample\nm: 4\n")
    assert main(["--db", str(tmp_path / "runs.db"), "run", "--config", str(config)]) == 2


def test_failing_check_exits_with_one(tmp_path):
    (tmp_path / "lopsided.txt").write_text("loss,0/1,1/1\nloss,0/1,0/1\n")
    config = tmp_path / "forced.yaml"
    config.write_text("experiment: nfl-f-average\nx_size: 3\nloss: file:lopsided.txt\nforce: true\n"
                      "learners: [constant:0, constant:1]\nworkers: 1\n")
    args = ["--db", str(tmp_path / "runs.db"), "run", "--config", str(config), "--out", str(tmp_path / "out")]
    assert main(args) == 1


@pytest.mark.slow
def test_verify_all_small_profile(tmp_path, capsys):
    args = ["--db", str(tmp_path / "runs.db"), "verify-all", "--profile", "small", "--out", str(tmp_path / "verify")]
    assert main(args) == 0
    assert (tmp_path / "verify" / "summary.csv").exists()
    assert "head-to-head" in capsys.readouterr().out
