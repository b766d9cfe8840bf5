import json
from importlib import resources

import pytest

from intransitive_dice.cli import EXIT_CHECK_FAILED, EXIT_RESOURCE, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count(capsys):
    assert run(capsys, "count", "--n", "10") == (0, "2934\n", "")
    code, out, _ = run(capsys, "--format", "json", "count", "--n", "23")
    assert code == 0 and json.loads(out)["count"] == 36912710568


def test_enumerate_formats(capsys):
    code, out, _ = run(capsys, "enumerate", "--n", "4")
    assert code == 0 and out.splitlines()[0] == "(1,1,4,4)" and len(out.splitlines()) == 5
    code, out, _ = run(capsys, "--format", "csv", "enumerate", "--n", "3")
    assert out == "1,2,3\n2,2,2\n"


def test_census(capsys):
    code, out, _ = run(capsys, "census", "--n", "4")
    doc = json.loads(out)
    assert code == 0 and (doc["total"], doc["intransitive"]) == (10, 1)


def test_sample_is_seeded(capsys):
    a = run(capsys, "--seed", "4", "sample", "--n", "12", "--count", "5")
    b = run(capsys, "--seed", "4", "sample", "--n", "12", "--count", "5")
    assert a[0] == 0 and a == b


def test_experiment_json_and_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    args = ["--seed", "2", "--out", str(out), "experiment", "--n", "8", "--trials", "300", "--omit-timing"]
    assert main(args) == 0
    first = out.read_text()
    assert main(args) == 0
    assert out.read_text() == first
    doc = json.loads(first)
    assert doc["spec"]["seed"] == 2 and doc["rows"][0]["trials"] == 300


def test_experiment_csv_header_carries_seed(capsys):
    code, out, _ = run(capsys, "--seed", "9", "--format", "csv", "experiment", "--n", "6", "--trials", "100")
    assert code == 0 and out.startswith("# ") and '"seed": 9' in out.splitlines()[0]


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 11, "experiment": {"trials": 50}}))
    code, out, _ = run(capsys, "--config", str(cfg), "experiment", "--n", "6", "--omit-timing")
    doc = json.loads(out)
    assert code == 0 and doc["spec"]["seed"] == 11 and doc["spec"]["trials"] == 50
    code, out, _ = run(capsys, "--config", str(cfg), "--seed", "1", "experiment", "--n", "6", "--trials", "70")
    doc = json.loads(out)
    assert doc["spec"]["seed"] == 1 and doc["spec"]["trials"] == 70


def test_usage_errors(capsys):
    assert run(capsys, "count")[0] == EXIT_USAGE
    assert run(capsys, "count", "--n", "0")[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    code, _, err = run(capsys, "experiment", "--n", "3", "--trials", "5")
    assert code == EXIT_USAGE and "distinct" in err


def test_resource_limit(capsys):
    code, _, err = run(capsys, "enumerate", "--n", "10", "--limit", "100")
    assert code == EXIT_RESOURCE and "Pr(10)" in err
    assert run(capsys, "tournament", "census", "--k", "7")[0] == EXIT_RESOURCE
    assert run(capsys, "onestep", "census", "--n", "80")[0] == EXIT_RESOURCE


def test_onestep_commands(capsys):
    code, out, _ = run(capsys, "onestep", "verify", "--n", "15", "--case", "46")
    doc = json.loads(out)
    assert code == 0 and doc["beat_forms"]["violations"] == [] and doc["cases"][0]["passed"]
    code, out, _ = run(capsys, "onestep", "census", "--n", "20")
    assert code == 0 and json.loads(out)["comparable_triples"] == 206596
    code, out, _ = run(capsys, "onestep", "coverage", "--n", "8")
    assert code == 0 and json.loads(out)["uncovered"] == 0


def test_tournament_commands(capsys):
    code, out, _ = run(capsys, "tournament", "census", "--k", "4")
    doc = json.loads(out)
    assert code == 0 and sorted(c["count"] for c in doc["classes"]) == [8, 8, 24, 24]
    code, out, _ = run(capsys, "--format", "csv", "tournament", "census", "--k", "3")
    assert out.splitlines()[0] == "canonical,score_sequence,count,probability"
    code, out, _ = run(capsys, "tournament", "experiment", "--n", "8", "--k", "3", "--trials", "200")
    doc = json.loads(out)
    assert code == 0 and doc["trials"] == 200 and doc["seed"] == 0


def test_reproduce_selected_checks(capsys):
    code, out, _ = run(capsys, "reproduce", "--check", "pr_table", "--check", "n4_census")
    assert code == 0
    assert out.count("[PASS]") == 2 and "2/2 checks passed" in out


def test_reproduce_with_corrupted_case_table(capsys, tmp_path):
    doc = json.loads(resources.files("intransitive_dice").joinpath("data/onestep_cases.json").read_text())
    for rec in doc["cases"]:
        if rec["index"] in (38, 46):
            rec["order"] = "ABC"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "--quick", "reproduce", "--case-table", str(path),
                       "--check", "case_table_verification", "--check", "case_table_data")
    assert code == EXIT_CHECK_FAILED
    line = next(l for l in out.splitlines() if "case_table_verification" in l)
    assert line.startswith("[FAIL]") and "38" in line and "46" in line
