import json
import subprocess
import sys

import pytest

from goldlab.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, main
from goldlab.core import canonical_informant
from goldlab.hypotheses import Evens
from goldlab.learners import evens_wmon_learner, run_trace
from goldlab.scenarios import builtin_names, load_builtin
from goldlab.tracefile import dump_trace


def test_list(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert all(name in out for name in builtin_names())


def test_reproduce_one(capsys):
    assert main(["reproduce", "wmon-not-nu"]) == EXIT_OK
    assert "all expectations met" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [["reproduce", "gold-rush"], ["reproduce"], ["run", "missing.json"]])
def test_errors_exit_with_two(argv, capsys):
    assert main(argv) == EXIT_ERROR
    assert capsys.readouterr().err.startswith("goldlab: error:")


def test_run_reports_a_mismatch(tmp_path, capsys):
    d = load_builtin("mon-not-caut").to_json()
    d["expect"]["Mon"] = {"outcome": "violation"}
    path = tmp_path / "s.json"
    path.write_text(json.dumps(d))
    assert main(["run", str(path)]) == EXIT_MISMATCH
    assert "EXPECTATION MISMATCH" in capsys.readouterr().out


def test_run_writes_artifacts(tmp_path, capsys):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(load_builtin("wmon-not-nu").to_json()))
    assert main(["run", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
    assert (tmp_path / "out" / "wmon-not-nu" / "verdicts.jsonl").exists()


def test_parallel_reproduction_matches_serial(tmp_path, capsys):
    assert main(["reproduce", "--all", "--out", str(tmp_path / "one")]) == EXIT_OK
    serial = capsys.readouterr().out
    assert main(["reproduce", "--all", "--jobs", "2", "--out", str(tmp_path / "two")]) == EXIT_OK
    parallel = capsys.readouterr().out
    assert "11/11 scenarios met their expectations" in serial
    assert serial.replace(str(tmp_path / "one"), "") == parallel.replace(str(tmp_path / "two"), "")
    files = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*") if p.is_file())
    assert files
    for f in files:
        assert (tmp_path / "one" / f).read_bytes() == (tmp_path / "two" / f).read_bytes(), f


@pytest.fixture
def trace_file(tmp_path):
    path = tmp_path / "u.jsonl"
    dump_trace(run_trace(evens_wmon_learner(), canonical_informant(Evens()), 50), path)
    return path


def test_check_a_trace_file(trace_file, capsys):
    assert main(["check", str(trace_file), "--monitor", "NU"]) == EXIT_MISMATCH
    line = capsys.readouterr().out.splitlines()[0]
    d = json.loads(line)
    assert (d["monitor"], d["outcome"], d["r"], d["s"], d["t"], d["horizon"]) == ("NU", "violation", 0, 2, 3, 50)
    assert main(["check", str(trace_file), "--monitor", "WMon"]) == EXIT_OK
    assert main(["check", str(trace_file), "--monitor", "Lim(0,1)", "--bound", "100"]) == EXIT_OK


def test_check_with_a_horizon_and_target(trace_file, capsys):
    # before step 3 the trace has not yet returned to the evens
    assert main(["check", str(trace_file), "--monitor", "NU", "--horizon", "3"]) == EXIT_OK
    assert main(["check", str(trace_file), "--monitor", "NU",
                 "--target", '{"kind": "evens_plus_one"}']) == EXIT_OK


def test_check_rejects_unknown_monitors(trace_file, capsys):
    assert main(["check", str(trace_file), "--monitor", "Fast"]) == EXIT_ERROR


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "goldlab", "list"], capture_output=True, text=True, timeout=60)
    assert done.returncode == 0 and "wmon-not-nu" in done.stdout
