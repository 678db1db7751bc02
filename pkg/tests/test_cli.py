import json
import subprocess
import sys

import pytest

from quantale.cli import main

from conftest import FIXTURES


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_eval_exact_golden(capsys):
    code, out, err = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "every_red.prop"),
    )
    assert code == 0
    assert out == '{"engine": "exact", "probability": 0.7, "scheme": "independent"}\n'
    assert err == ""


def test_eval_naive_golden(capsys):
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "every_red.prop"),
        "--engine", "naive",
    )
    assert code == 0
    assert out == '{"engine": "naive", "probability": 0.0}\n'


def test_eval_scheme_warning_for_naive(capsys):
    code, _, err = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "every_red.prop"),
        "--engine", "naive",
        "--scheme", "coupled-threshold",
    )
    assert code == 0
    assert "ignored" in err


def test_eval_mc_deterministic(capsys):
    argv = [
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "some_red.prop"),
        "--engine", "mc",
        "--samples", "500",
        "--seed", "11",
    ]
    first = run_cli(capsys, *argv)
    second = run_cli(capsys, *argv)
    assert first == second
    assert first[0] == 0
    doc = json.loads(first[1])
    assert doc["engine"] == "mc"
    assert doc["samples"] == 500
    assert doc["seed"] == 11
    assert doc["ci"][0] <= doc["probability"] <= doc["ci"][1]


def test_eval_mc_seed_from_environment(capsys, monkeypatch):
    argv = [
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "some_red.prop"),
        "--engine", "mc",
        "--samples", "500",
    ]
    monkeypatch.setenv("QUANTALE_SEED", "11")
    from_env = run_cli(capsys, *argv)
    explicit = run_cli(capsys, *argv, "--seed", "11")
    assert from_env == explicit


def test_eval_mc_requires_samples_and_seed(capsys, monkeypatch):
    monkeypatch.delenv("QUANTALE_SEED", raising=False)
    code, out, err = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "some_red.prop"),
        "--engine", "mc",
    )
    assert code == 2
    assert out == ""
    assert "--samples" in err and "--seed" in err


def test_eval_csv_output(capsys):
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "every_red.prop"),
        "--output", "csv",
    )
    assert code == 0
    header, row, trailer = out.split("\n")
    assert header == "engine,probability,scheme"
    assert row == '"exact",0.7,"independent"'
    assert trailer == ""


def test_eval_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.prop"
    bad.write_text("(every (x) true)")
    code, out, err = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(bad),
    )
    assert code == 1
    doc = json.loads(out)
    assert doc["diagnostics"][0]["severity"] == "error"
    assert "line" in doc["diagnostics"][0]
    assert err != ""


def test_eval_validation_error_exit_code(capsys, tmp_path):
    mismatched = tmp_path / "blue.prop"
    mismatched.write_text("(every (x) true (blue x))")
    code, out, err = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(mismatched),
    )
    assert code == 1
    assert "unknown predicate 'blue'" in err


def test_eval_missing_file(capsys, tmp_path):
    code, out, err = run_cli(
        capsys,
        "eval",
        "--world", str(tmp_path / "nope.world.json"),
        "--prop", str(FIXTURES / "every_red.prop"),
    )
    assert code == 1
    assert "error" in err


def test_eval_generic_fast_rejects_precise(capsys):
    code, _, err = run_cli(
        capsys,
        "eval",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(FIXTURES / "every_red.prop"),
        "--engine", "generic-fast",
    )
    assert code == 2
    assert "error" in err


def test_curve_golden(capsys):
    code, out, _ = run_cli(capsys, "curve", "--kind", "most", "--points", "5")
    assert code == 0
    assert out == (
        "ratio,value\n"
        "0.0,0.0\n"
        "0.25,0.0\n"
        "0.5,0.0\n"
        "0.75,1.0\n"
        "1.0,1.0\n"
    )


def test_curve_unknown_kind(capsys):
    code, _, err = run_cli(capsys, "curve", "--kind", "bogus", "--points", "3")
    assert code == 1
    assert "unknown quantifier kind" in err


def test_check_valid(capsys):
    code, out, _ = run_cli(
        capsys,
        "check",
        "--world", str(FIXTURES / "donkey_half.world.json"),
        "--prop", str(FIXTURES / "donkey.prop"),
    )
    assert code == 0
    assert out == "[]\n"


def test_check_invalid(capsys, tmp_path):
    open_prop = tmp_path / "open.prop"
    open_prop.write_text("(red x)")
    code, out, err = run_cli(
        capsys,
        "check",
        "--world", str(FIXTURES / "red.world.json"),
        "--prop", str(open_prop),
    )
    assert code == 1
    doc = json.loads(out)
    assert any("root has free variables" in d["message"] for d in doc)


def test_rsa_l0_golden(capsys):
    code, out, _ = run_cli(
        capsys,
        "rsa",
        "--scenario", str(FIXTURES / "prevalence.scenario.json"),
        "--agent", "l0",
        "--utterance", "generic",
    )
    assert code == 0
    assert json.loads(out) == {"support": ["zero", "half"], "probs": [0.0, 1.0]}


def test_rsa_s1(capsys):
    code, out, _ = run_cli(
        capsys,
        "rsa",
        "--scenario", str(FIXTURES / "prevalence.scenario.json"),
        "--agent", "s1",
        "--state", "half",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["support"] == ["generic", "silence"]
    assert doc["probs"] == [1.0, 0.0]


def test_rsa_l1_verbose(capsys):
    code, out, _ = run_cli(
        capsys,
        "rsa",
        "--scenario", str(FIXTURES / "donkey.scenario.json"),
        "--agent", "l1",
        "--utterance", "donkey",
        "--verbose",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["support"] == ["prop000", "prop050", "prop100"]
    assert doc["probs"][0] == 0.0
    assert doc["meanings"]["donkey"]["prop050"] == 0.5


def test_rsa_missing_argument(capsys):
    code, _, err = run_cli(
        capsys,
        "rsa",
        "--scenario", str(FIXTURES / "prevalence.scenario.json"),
        "--agent", "l0",
    )
    assert code == 2
    assert "--utterance" in err


def test_rsa_unknown_utterance(capsys):
    code, _, err = run_cli(
        capsys,
        "rsa",
        "--scenario", str(FIXTURES / "prevalence.scenario.json"),
        "--agent", "l0",
        "--utterance", "nope",
    )
    assert code == 1
    assert "unknown utterance" in err


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "quantale.cli", "curve", "--kind", "generic",
         "--points", "2"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert result.stdout == "ratio,value\n0.0,0.0\n1.0,1.0\n"
