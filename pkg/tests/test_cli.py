import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from homcup.cli import SpecError, load_spec, main, run, spec_hash, validate_spec, verify_suite

SPECS = Path(__file__).resolve().parent.parent / "specs"
TORIC = SPECS / "toric3.json"


def _reports(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines()]


def _strip_timing(r):
    return {k: v for k, v in r.items() if k != "timing"}


def test_params_toric(tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["params", "--spec", str(TORIC), "--out", str(out)]) == 0
    (r,) = _reports(out)
    assert r["ok"] and r["result"]["code"]["N"] == 648 and r["result"]["code"]["k"] == 3
    assert r["version"] and len(r["spec_sha256"]) == 64


def test_invariant_toric(tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["invariant", "--spec", str(TORIC), "--out", str(out)]) == 0
    (r,) = _reports(out)
    assert r["result"]["values"] == [[[1]]] and r["result"]["invariance"]["passed"]


def test_reports_append_and_are_deterministic(tmp_path):
    out = tmp_path / "r.jsonl"
    for _ in range(2):
        assert main(["params", "--spec", str(TORIC), "--out", str(out)]) == 0
    a, b = _reports(out)
    assert _strip_timing(a) == _strip_timing(b)


def test_stdout_report(capsys):
    assert main(["describe", "--spec", str(TORIC)]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["task"] == "describe" and r["ok"]


def test_malformed_spec_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"base": {"kind": "complete", "n": 3}, "t": "three"}))
    assert main(["params", "--spec", str(bad)]) == 2
    assert "/t" in capsys.readouterr().err


def test_invalid_json_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["params", "--spec", str(bad)]) == 2


def test_task_mismatch_exit_2(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"task": "cup", "base": {"kind": "complete", "n": 3}, "t": 2}))
    assert main(["params", "--spec", str(spec)]) == 2


def test_even_lift_configuration_exit_2(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"base": {"kind": "complete", "n": 4}, "t": 2, "lift": {"l": 2}}))
    assert main(["describe", "--spec", str(spec)]) == 2


def test_unknown_suite_exit_2():
    assert main(["verify", "--suite", "no-such-suite"]) == 2
    with pytest.raises(SpecError):
        verify_suite("no-such-suite")


def test_verify_suite_alias_in_spec(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"task": "verify-suite", "suite": "properties"}))
    s = load_spec(str(spec))
    assert s["task"] == "verify"


def test_schema_requires_base():
    with pytest.raises(SpecError):
        validate_spec({"task": "params", "t": 2})


def test_spec_hash_ignores_key_order():
    assert spec_hash({"a": 1, "b": 2}) == spec_hash({"b": 2, "a": 1})


@pytest.mark.parametrize("suite", ["paper-worked-examples", "properties"])
def test_builtin_suites_pass(suite, tmp_path):
    out = tmp_path / "r.jsonl"
    assert main(["verify", "--suite", suite, "--out", str(out)]) == 0
    (r,) = _reports(out)
    assert r["ok"] and all(c["ok"] for c in r["result"]["checks"])


@pytest.mark.parametrize("name,task", [("k4_sequence.json", "sequence"), ("k4_polarized.json", "cup"),
                                       ("toric2_distance.json", "params")])
def test_example_specs_run(name, task):
    spec = load_spec(str(SPECS / name), task)
    assert run(spec)["ok"]


def test_console_entry_subprocess(tmp_path):
    out = tmp_path / "r.jsonl"
    env = dict(os.environ, HOMCUP_NO_NUMBA="1")
    proc = subprocess.run([sys.executable, "-m", "homcup", "params", "--spec", str(TORIC),
                           "--out", str(out)], env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    (r,) = _reports(out)
    assert r["timing"]["backend"] == "numpy" and r["result"]["code"]["k"] == 3
