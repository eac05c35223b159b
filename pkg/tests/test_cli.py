import io
import json
import subprocess
import sys
from fractions import Fraction
from importlib import resources

import jsonschema
import pytest

from qborwein.cli import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, PRECISION_ENV, main
from qborwein.series import borwein_coeffs

SCHEMA = json.loads(resources.files("qborwein").joinpath("report_schema.json").read_text())


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, text, err = run(*argv, "--format", "json")
    doc = json.loads(text)
    jsonschema.validate(doc, SCHEMA)
    return code, doc


# --- coeffs ---------------------------------------------------------------------

def test_coeffs_csv():
    code, text, _ = run("coeffs", "--p", "3", "--delta", "1", "--order", "6", "--format", "csv")
    lines = text.splitlines()
    assert code == EXIT_OK
    assert lines[0] == "n,coefficient"
    assert len(lines) == 8
    assert lines[-1] == "6,2"


def test_coeffs_zero_power():
    code, doc = run_json("coeffs", "--p", "3", "--delta", "0", "--order", "3")
    assert code == EXIT_OK
    assert [r["coefficient"] for r in doc["rows"]] == ["1/1", "0/1", "0/1", "0/1"]


def test_coeffs_vanishing_rows():
    code, doc = run_json("coeffs", "--p", "3", "--delta", "3", "--order", "8")
    assert code == EXIT_OK
    assert all(doc["rows"][n]["coefficient"] == "0/1" for n in (2, 5, 8))


def test_coeffs_rational_delta_is_exact():
    code, doc = run_json("coeffs", "--p", "5", "--delta", "0.227", "--order", "20")
    assert doc["config"]["delta"] == "227/1000"
    expected = borwein_coeffs(5, Fraction(227, 1000), 20)
    assert [Fraction(r["coefficient"]) for r in doc["rows"]] == list(expected.coeffs)


def test_coeffs_text_format():
    code, text, _ = run("coeffs", "--p", "2", "--delta", "1/2", "--order", "4", "--format", "text")
    assert code == EXIT_OK
    assert text.splitlines()[0].split() == ["n", "coefficient"]
    assert text.splitlines()[2].split() == ["1", "-1/2"]


@pytest.mark.parametrize(
    "argv",
    [
        ("coeffs", "--p", "1", "--delta", "1", "--order", "5"),
        ("coeffs", "--p", "3", "--delta", "-1", "--order", "5"),
        ("coeffs", "--p", "3", "--delta", "one", "--order", "5"),
        ("coeffs", "--p", "3", "--delta", "1", "--order", "-1"),
        ("coeffs", "--p", "3", "--delta", "1"),
    ],
)
def test_coeffs_usage_errors(argv):
    code, text, err = run(*argv)
    assert code == EXIT_USAGE
    assert text == ""
    assert err


# --- estimate ---------------------------------------------------------------------

def test_estimate_all_within_bound():
    code, doc = run_json("estimate", "--p", "3", "--delta", "1", "--n-min", "1", "--n-max", "100", "--N", "2")
    assert code == EXIT_OK
    assert len(doc["rows"]) == 100
    assert all(r["within_bound"] for r in doc["rows"])
    assert doc["verdict"] == "pass"


def test_estimate_hypothesis_boundary():
    code, _ = run_json("estimate", "--p", "2", "--delta", "24", "--n-min", "2", "--n-max", "4")
    assert code == EXIT_OK
    code, _, err = run("estimate", "--p", "2", "--delta", "24.0001", "--n-min", "2")
    assert code == EXIT_USAGE
    assert "hypothesis" in err


def test_estimate_rejects_n_zero_and_bad_range():
    assert run("estimate", "--p", "3", "--delta", "1", "--n-min", "0")[0] == EXIT_USAGE
    assert run("estimate", "--p", "3", "--delta", "1", "--n-min", "5", "--n-max", "4")[0] == EXIT_USAGE
    assert run("estimate", "--p", "6", "--delta", "1", "--n-min", "5")[0] == EXIT_USAGE


def test_estimate_signs_in_corollary_regime():
    code, doc = run_json("estimate", "--p", "3", "--delta", "3", "--n-min", "158", "--n-max", "200", "--N", "2")
    assert code == EXIT_OK
    assert all(r["predicted_sign"] == r["actual_sign"] for r in doc["rows"])


def test_estimate_csv_header():
    code, text, _ = run("estimate", "--p", "5", "--delta", "1/2", "--n-min", "3", "--n-max", "5", "--format", "csv")
    lines = text.splitlines()
    assert lines[0].split(",")[:5] == ["p", "delta", "n", "N", "exact_coeff"]
    assert len(lines) == 4


def test_estimate_parallel_output_identical():
    argv = ("estimate", "--p", "3", "--delta", "3/2", "--n-min", "1", "--n-max", "30", "--N", "2")
    _, serial, _ = run(*argv)
    _, parallel, _ = run(*argv, "--parallelism", "2")
    assert json.loads(serial)["rows"] == json.loads(parallel)["rows"]


# --- verify ----------------------------------------------------------------------

def test_verify_main_k2():
    code, doc = run_json("verify", "--suite", "main", "--k", "2", "--order", "200")
    assert code == EXIT_OK
    assert doc["verdict"] == "pass"
    [check] = doc["checks"]
    assert check["residual"] == "0/1"


def test_verify_unknown_suite():
    code, _, err = run("verify", "--suite", "nope")
    assert code == EXIT_USAGE
    assert "invalid choice" in err


def test_verify_conjecture1_exploratory_does_not_fail():
    code, doc = run_json("verify", "--suite", "conjecture1", "--delta", "1/5", "--order", "300")
    assert code == EXIT_OK
    [check] = doc["checks"]
    assert check["asserted"] is False
    assert check["passed"] is False
    assert check["detail"]["first_negative"]["A"] == 1


def test_verify_signs_exploratory_delta():
    code, doc = run_json("verify", "--suite", "signs", "--delta", "1/2", "--p", "3", "--order", "200")
    assert code == EXIT_OK
    assert all(c["asserted"] is False for c in doc["checks"] if "p=3 delta" in c["name"])


def test_verify_vanishing_requires_odd_k():
    code, _, err = run("verify", "--suite", "vanishing", "--k", "4")
    assert code == EXIT_USAGE


def test_verify_failure_exit_code(monkeypatch):
    from qborwein import cli

    monkeypatch.setitem(cli.SUITE_RUNNERS, "main", lambda v: [cli.Check("main", "forced", False, residual=Fraction(1))])
    code, doc = run_json("verify", "--suite", "main")
    assert code == EXIT_CHECK_FAILED
    assert doc["verdict"] == "fail"


@pytest.mark.parametrize(
    "suite, extra",
    [
        ("jtpe", ("--k", "3")),
        ("lambert", ()),
        ("two-squares", ("--order", "200")),
        ("cubic", ("--order", "120")),
        ("vanishing", ("--k", "5", "--order", "300")),
        ("divisibility", ("--order", "300")),
        ("signs", ("--order", "300")),
        ("transform", ()),
    ],
)
def test_verify_suites_pass(suite, extra):
    code, doc = run_json("verify", "--suite", suite, *extra)
    assert code == EXIT_OK, [c for c in doc["checks"] if not c["passed"]]
    assert doc["checks"]


def test_verify_mth_restricted():
    code, doc = run_json("verify", "--suite", "mth", "--p", "5", "--delta", "3", "--order", "40")
    assert code == EXIT_OK
    assert len(doc["checks"]) == 1


def test_verify_mth1_restricted():
    code, doc = run_json("verify", "--suite", "mth1", "--delta", "1", "--order", "60")
    assert code == EXIT_OK
    assert len(doc["checks"]) == 2


@pytest.mark.slow
def test_verify_all():
    code, doc = run_json("verify", "--suite", "all", "--order", "300", "--parallelism", "4")
    assert code == EXIT_OK
    assert doc["verdict"] == "pass"


# --- config, determinism -------------------------------------------------------------

def test_precision_env(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV, "96")
    code, doc = run_json("coeffs", "--p", "3", "--delta", "1", "--order", "2")
    assert doc["config"]["precision_bits"] == 96
    code, doc = run_json("coeffs", "--p", "3", "--delta", "1", "--order", "2", "--precision", "200")
    assert doc["config"]["precision_bits"] == 200


def test_bad_precision(monkeypatch):
    assert run("coeffs", "--p", "3", "--delta", "1", "--order", "2", "--precision", "40")[0] == EXIT_USAGE
    monkeypatch.setenv(PRECISION_ENV, "lots")
    assert run("coeffs", "--p", "3", "--delta", "1", "--order", "2")[0] == EXIT_USAGE


def test_precision_changes_estimate_digits_only_slightly():
    _, a = run_json("estimate", "--p", "3", "--delta", "1", "--n-min", "20", "--precision", "96")
    _, b = run_json("estimate", "--p", "3", "--delta", "1", "--n-min", "20", "--precision", "256")
    ra, rb = a["rows"][0], b["rows"][0]
    assert ra["exact_coeff"] == rb["exact_coeff"]
    assert abs(float(ra["main_term"]) - float(rb["main_term"])) < 1e-20 * abs(float(rb["main_term"])) + 1e-25


@pytest.mark.parametrize(
    "argv",
    [
        ("coeffs", "--p", "7", "--delta", "5/3", "--order", "40", "--format", "csv"),
        ("estimate", "--p", "2", "--delta", "3/4", "--n-min", "1", "--n-max", "12", "--N", "3"),
        ("verify", "--suite", "cubic", "--order", "60", "--format", "text"),
        ("verify", "--suite", "transform", "--format", "json"),
    ],
)
def test_output_is_byte_deterministic(argv):
    assert run(*argv)[1] == run(*argv)[1]


def test_help_exits_zero():
    assert run("--help")[0] == EXIT_OK


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qborwein", "coeffs", "--p", "3", "--delta", "1", "--order", "6", "--format", "csv"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1] == "6,2"
