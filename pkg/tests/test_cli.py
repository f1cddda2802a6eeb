"""End-to-end command behavior: formats, exit codes, config, determinism."""

import csv
import io
import json

import pytest

from powertowers.cli import main

from oracles import TWO_TO_SQRT2_50


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- enumerate ---------------------------------------------------------------


def test_enumerate_count_opens_the_sequence(capsys):
    code, out, err = run(capsys, "enumerate", "--count", "11")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 11
    assert lines[0] == "#1 w2 (1/1) = 1.0 (rational)"
    assert "(1/5)" in lines[10]
    assert "generated=" in err and err not in out


def test_enumerate_count_zero_is_empty(capsys):
    code, out, _ = run(capsys, "enumerate", "--count", "0")
    assert code == 0
    assert out == ""


def test_enumerate_jsonl_rows_parse(capsys):
    code, out, _ = run(capsys, "enumerate", "--max-weight", "5", "--format", "jsonl")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["expr"] for r in rows] == [
        "(1/1)",
        "(2/1)",
        "(1/2)",
        "(3/1)",
        "(1/3)",
        "(4/1)",
        "(3/2)",
        "(2/3)",
        "(1/4)",
    ]
    assert all(set(r) == {"index", "weight", "expr", "value", "exact"} for r in rows)


def test_enumerate_csv_rows_parse(capsys):
    code, out, _ = run(capsys, "enumerate", "--count", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["expr"] == "(1/1)"
    assert rows[0]["exact"] == "true"
    assert rows[3]["weight"] == "4"


def test_enumerate_needs_exactly_one_bound(capsys):
    with pytest.raises(SystemExit) as info:
        main(["enumerate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["enumerate", "--count", "3", "--max-weight", "5"])
    assert info.value.code == 2
    capsys.readouterr()


def test_enumerate_rejects_negative_count(capsys):
    code, _, err = run(capsys, "enumerate", "--count", "-2")
    assert code == 2
    assert "error" in err


def test_enumerate_runs_are_byte_identical(capsys):
    first = run(capsys, "enumerate", "--count", "120", "--format", "jsonl")
    second = run(capsys, "enumerate", "--count", "120", "--format", "jsonl")
    assert first == second


def test_enumerate_checkpoint_resumes(capsys, tmp_path):
    path = str(tmp_path / "ck.json")
    code, first, _ = run(capsys, "enumerate", "--count", "5", "--checkpoint", path)
    assert code == 0
    code, second, _ = run(capsys, "enumerate", "--count", "4", "--checkpoint", path)
    assert code == 0
    code, fresh, _ = run(capsys, "enumerate", "--count", "9")
    assert first + second == fresh


def test_enumerate_corrupt_checkpoint_is_config_error(capsys, tmp_path):
    path = tmp_path / "ck.json"
    path.write_text("{}")
    code, _, err = run(capsys, "enumerate", "--count", "2", "--checkpoint", str(path))
    assert code == 2
    assert "checkpoint" in err


# --- eval ---------------------------------------------------------------------


def test_eval_prints_digits(capsys):
    code, out, _ = run(capsys, "eval", "(2/1)^[(2/1)^(1/2)]", "--digits", "30")
    assert code == 0
    assert out.strip() == TWO_TO_SQRT2_50[: len("2.") + 30]


def test_eval_jsonl_record(capsys):
    code, out, _ = run(capsys, "eval", "(1/3)", "--digits", "4", "--format", "jsonl")
    record = json.loads(out)
    assert code == 0
    assert record == {"expr": "(1/3)", "digits": 4, "value": "0.3333", "exact": True}


def test_eval_rejects_malformed_expression(capsys):
    code, out, err = run(capsys, "eval", "(2/1", "--digits", "5")
    assert code == 2
    assert out == ""
    assert "offset" in err


def test_eval_rejects_nonpositive_digits(capsys):
    code, _, _ = run(capsys, "eval", "(1/2)", "--digits", "0")
    assert code == 2


# --- approx --------------------------------------------------------------------


def test_approx_exact_integer_hit(capsys):
    code, out, _ = run(capsys, "approx", "--target", "2", "--max-weight", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"weight": "3", "expr": "(2/1)", "error_upper_bound": "0.0"}]


def test_approx_profile_rows(capsys):
    code, out, _ = run(
        capsys, "approx", "--target", "pi", "--weights", "5,9", "--format", "csv"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["weight"] for r in rows] == ["5", "9"]
    assert rows[0]["expr"] == "(3/1)"
    assert float(rows[1]["error_upper_bound"]) <= float(rows[0]["error_upper_bound"])


def test_approx_rejects_unknown_target(capsys):
    code, _, err = run(capsys, "approx", "--target", "tau", "--max-weight", "5")
    assert code == 2
    assert "tau" in err


# --- nested ---------------------------------------------------------------------


def test_nested_eq15_emits_csv_straddling_one(capsys):
    code, out, err = run(
        capsys, "nested", "--source", "eq15", "--a", "0", "--b", "2", "--depth", "5"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    for row in rows:
        assert float(row["alpha_value"]) < 1 < float(row["beta_value"])
    assert rows[0]["alpha"] == "2/4"
    assert rows[0]["beta"] == "6/4"
    assert "termination: depth reached" in err


def test_nested_accepts_fraction_endpoints(capsys):
    code, out, _ = run(
        capsys,
        "nested",
        "--source", "rationals",
        "--a", "1/4",
        "--b", "1/2",
        "--depth", "2",
        "--format", "jsonl",
    )
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 2
    assert rows[0]["level"] == 0


def test_nested_budget_exhaustion_fails_cleanly(capsys, tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("0.5\n")
    code, out, err = run(
        capsys,
        "nested",
        "--source", "file",
        "--file", str(path),
        "--a", "0",
        "--b", "1",
        "--depth", "2",
    )
    assert code == 1
    assert out == ""
    assert "inside the interval" in err


def test_nested_file_source_requires_path(capsys):
    code, _, err = run(
        capsys, "nested", "--source", "file", "--a", "0", "--b", "1", "--depth", "1"
    )
    assert code == 2
    assert "--file" in err


def test_nested_rejects_bad_endpoints(capsys):
    code, _, _ = run(
        capsys, "nested", "--source", "eq15", "--a", "2", "--b", "0", "--depth", "3"
    )
    assert code == 2


# --- diagonal -------------------------------------------------------------------


def test_diagonal_text_rows_and_assembled_prefix(capsys):
    code, out, _ = run(capsys, "diagonal", "--count", "5")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 6
    assert lines[0].startswith("nu 1: (1/1) digit 0 -> 5")
    assert lines[-1] == "assembled: 0.55555"


def test_diagonal_csv_has_no_trailer(capsys):
    code, out, _ = run(capsys, "diagonal", "--count", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3
    assert [r["position"] for r in rows] == ["1", "2", "3"]


def test_diagonal_profile_series_column(capsys):
    code, out, _ = run(
        capsys, "diagonal", "--count", "6", "--profile", "--format", "csv"
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["series"] for r in rows] == [
        "0.1",
        "0.01",
        "0.001",
        "0.0001",
        "1e-05",
        "1e-06",
    ]


def test_diagonal_over_file_source(capsys, tmp_path):
    path = tmp_path / "seq.txt"
    path.write_text("(1/3)\n0.25\n(2/1)^(1/2)\n")
    code, out, _ = run(
        capsys,
        "diagonal",
        "--count", "3",
        "--source", "file",
        "--file", str(path),
        "--format", "jsonl",
    )
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows[0]["diag_digit"] == 3  # 0.333...
    assert rows[1]["diag_digit"] == 5  # 0.25 -> place 2
    assert rows[2]["diag_digit"] == 4  # sqrt2 mod 1 = .41421..., place 3 is 4
    assert rows[3] == {"assembled": "0.545"}


# --- verify-prefix ------------------------------------------------------------------


def test_verify_prefix_reports_full_match(capsys):
    code, out, _ = run(capsys, "verify-prefix")
    assert code == 0
    assert out.splitlines()[0] == "match: 75/75"


# --- config file ---------------------------------------------------------------------


def test_config_file_sets_default_format(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"output_format": "jsonl"}))
    monkeypatch.setenv("POWERTOWERS_CONFIG", str(config))
    code, out, _ = run(capsys, "enumerate", "--count", "2")
    assert code == 0
    assert json.loads(out.splitlines()[0])["expr"] == "(1/1)"


def test_config_flag_overrides_file(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"output_format": "jsonl"}))
    monkeypatch.setenv("POWERTOWERS_CONFIG", str(config))
    code, out, _ = run(capsys, "enumerate", "--count", "1", "--format", "text")
    assert code == 0
    assert out.startswith("#1 ")


def test_config_rejects_low_precision_cap(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"precision_cap": 32}))
    monkeypatch.setenv("POWERTOWERS_CONFIG", str(config))
    code, _, err = run(capsys, "enumerate", "--count", "1")
    assert code == 2
    assert ">= 64" in err


def test_config_rejects_unknown_keys(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"colour": "blue"}))
    monkeypatch.setenv("POWERTOWERS_CONFIG", str(config))
    code, _, err = run(capsys, "enumerate", "--count", "1")
    assert code == 2
    assert "colour" in err


def test_config_rejects_other_dedup_policies(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"dedup_policy": "structural"}))
    monkeypatch.setenv("POWERTOWERS_CONFIG", str(config))
    code, _, err = run(capsys, "enumerate", "--count", "1")
    assert code == 2
    assert "value" in err


def test_config_checkpoint_default_is_used(capsys, tmp_path, monkeypatch):
    config = tmp_path / "config.json"
    ck = tmp_path / "ck.json"
    config.write_text(json.dumps({"checkpoint": str(ck)}))
    monkeypatch.setenv("POWERTOWERS_CONFIG", str(config))
    code, first, _ = run(capsys, "enumerate", "--count", "3")
    assert code == 0
    assert ck.exists()
    code, second, _ = run(capsys, "enumerate", "--count", "2")
    monkeypatch.delenv("POWERTOWERS_CONFIG")
    code, fresh, _ = run(capsys, "enumerate", "--count", "5")
    assert first + second == fresh
