import json
import math
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discrete_bvp4.cli import (
    ProblemFileError,
    dump_problem,
    main,
    parse_problem,
    problem_from_dict,
    problem_to_dict,
)

BUNDLED = resources.files("discrete_bvp4") / "problems"


def bundled(name):
    return str(BUNDLED / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text, name="problem.json"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


@pytest.mark.parametrize(
    "name, code, guarantee",
    [
        ("paper-example.json", 3, "none-certified"),
        ("cubic-multi.json", 0, "≥2N"),
        ("n1-cubic.json", 0, "≥2N"),
        ("linear-unique.json", 0, "exactly 1"),
    ],
)
def test_check_bundled(capsys, name, code, guarantee):
    rc, out, err = run(capsys, "check", bundled(name))
    assert rc == code
    doc = json.loads(out)
    assert doc["guaranteed_count"] == guarantee
    assert "guaranteed_count" in err


def test_check_report_layout(capsys):
    _, out, _ = run(capsys, "check", bundled("paper-example.json"))
    doc = json.loads(out)
    assert doc["spectral"]["N"] == 2
    assert doc["spectral"]["closed_form_check"]["passed"]
    assert doc["constants"]["alpha2"] == pytest.approx(-15.0)
    theo1 = doc["theorems"]["theo1"]
    assert theo1["verdict"] == "fails"
    cond = next(c for c in theo1["conditions"] if "alpha2" in c["name"])
    assert cond["left"] == {"kind": "finite", "value": 1.0}
    assert cond["margin"] == pytest.approx(16.0)
    assert any("12" in n for n in doc["notes"])
    assert doc["problem"] == json.loads((BUNDLED / "paper-example.json").read_text())


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"N": 1,', "line 1"),
        ('{"N": 1, "p": [1,1,1], "q": [1,1], "f": {"shared": [0]}, "extra": 1}', "extra"),
        ('{"N": 1, "p": [1,1], "q": [1,1], "f": {"shared": [0]}}', '"p"'),
        ('{"N": 1, "p": [1,1,1], "q": [1,1], "f": {"shared": [NaN]}}', "NaN"),
        ('{"N": 1, "p": [1,1,1], "q": [1,1], "f": {"shared": [1e999]}}', "finite"),
        ('{"N": 2, "p": [1,1,1,1], "q": [1,1,1], "f": {"per_k": [[0]]}}', "per_k"),
        ('{"N": 0, "p": [1], "q": [], "f": {"shared": [0]}}', '"N"'),
        ('{"N": 1, "p": [1,1,true], "q": [1,1], "f": {"shared": [0]}}', '"p"[2]'),
        ('{"N": 1, "p": [1,1,1], "q": [1,1], "f": {"odd": [0]}}', '"f"'),
        ("[1, 2]", "object"),
    ],
)
def test_malformed_input_exits_2(capsys, tmp_path, text, fragment):
    rc, out, err = run(capsys, "check", write(tmp_path, text))
    assert rc == 2
    assert out == ""
    assert fragment in err


def test_missing_file_exits_2(capsys, tmp_path):
    rc, _, err = run(capsys, "check", str(tmp_path / "nope.json"))
    assert rc == 2 and "cannot read" in err


@pytest.mark.parametrize(
    "name, extra, count",
    [("n1-cubic.json", [], 3), ("paper-example.json", [], 1), ("cubic-multi.json", ["--radius", "12"], 9)],
)
def test_solve_bundled(capsys, name, extra, count):
    rc, out, _ = run(capsys, "solve", bundled(name), *extra)
    assert rc == 0
    doc = json.loads(out)
    assert len(doc["solutions"]) == count
    assert doc["search"]["statement"] == f"found {count} distinct solutions"
    assert doc["seed"] == 0 and doc["starts_used"] == 64
    for s in doc["solutions"]:
        assert s["residual_norm"] <= 1e-10
        assert s["classification"] in {"minimizer", "maximizer", "saddle", "unclassified"}


def test_solve_csv(capsys, tmp_path):
    csv_path = tmp_path / "sols.csv"
    rc, _, _ = run(capsys, "solve", bundled("n1-cubic.json"), "--csv", str(csv_path))
    assert rc == 0
    lines = csv_path.read_bytes().decode().split("\n")
    assert lines[0] == "solution_index,k,y_k"
    rows = [l.split(",") for l in lines[1:] if l]
    assert len(rows) == 3 * 5
    assert [int(r[1]) for r in rows[:5]] == [-1, 0, 1, 2, 3]
    assert all(float(r[2]) == 0.0 for r in rows if int(r[1]) in (-1, 0, 2, 3))
    assert b"\r" not in csv_path.read_bytes()


def test_solve_respects_flags(capsys):
    _, out, _ = run(capsys, "solve", bundled("n1-cubic.json"), "--starts", "5", "--seed", "9",
                    "--max-solutions", "2", "--tol", "1e-11")
    doc = json.loads(out)
    assert len(doc["solutions"]) == 2
    assert doc["seed"] == 9
    assert doc["search"]["tol_residual"] == 1e-11
    assert doc["starts_used"] <= 5


def test_solve_is_byte_identical(capsys):
    argv = ["solve", bundled("cubic-multi.json"), "--radius", "12", "--seed", "3"]
    outs = [run(capsys, *argv)[1] for _ in range(2)]
    assert outs[0] == outs[1]


@pytest.mark.parametrize(
    "argv",
    [["solve", "x.json", "--bogus"], ["solve", "x.json", "--starts", "0"], ["solve", "x.json", "--radius", "-1"],
     ["frobnicate"], []],
)
def test_bad_flags_exit_2(capsys, argv):
    rc, _, err = run(capsys, *argv)
    assert rc == 2
    assert "usage" in err


def test_unknown_flag_lists_valid_flags(capsys):
    _, _, err = run(capsys, "solve", "x.json", "--bogus")
    for flag in ("--starts", "--seed", "--radius", "--tol", "--max-solutions", "--csv"):
        assert flag in err


@pytest.mark.parametrize("n, lam1, lam2", [(1, "2", "6"), (2, "1", "2"), (4, "0.38196601125", None)])
def test_spectra(capsys, n, lam1, lam2):
    rc, out, _ = run(capsys, "spectra", str(n))
    assert rc == 0
    assert f"lambda1 = {lam1}\n" in out
    if lam2:
        assert f"lambda2 = {lam2}\n" in out


def test_spectra_rejects_small_n(capsys):
    assert run(capsys, "spectra", "0")[0] == 2


def test_verify_small(capsys):
    rc, out, err = run(capsys, "verify", "--n-max", "8", "--samples", "200", "--seed", "1")
    assert rc == 0
    doc = json.loads(out)
    assert doc["lemma4"]["passed"] and doc["lemma6"]["passed"]
    assert "PASS lemma4" in err


def test_oracle(capsys):
    rc, out, _ = run(capsys, "oracle", bundled("n1-cubic.json"), "--radius", "10", "--step", "0.01")
    assert rc == 0
    pts = sorted(s["interior"][0] for s in json.loads(out)["solutions"])
    np.testing.assert_allclose(pts, [-math.sqrt(48), 0.0, math.sqrt(48)], atol=1e-9)


def test_oracle_guards(capsys):
    assert run(capsys, "oracle", bundled("n5-cubic.json"))[0] == 2
    rc, _, err = run(capsys, "oracle", bundled("cubic-multi.json"), "--step", "1e-5")
    assert rc == 2 and "budget" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "discrete_bvp4", "spectra", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "lambda1 = 1\n" in proc.stdout


coeff = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def problem_docs(draw):
    n = draw(st.integers(1, 6))
    doc = {
        "N": n,
        "p": draw(st.lists(coeff, min_size=n + 2, max_size=n + 2)),
        "q": draw(st.lists(coeff, min_size=n + 1, max_size=n + 1)),
    }
    if draw(st.booleans()):
        doc["f"] = {"shared": draw(st.lists(coeff, min_size=1, max_size=6))}
    else:
        doc["f"] = {"per_k": [draw(st.lists(coeff, min_size=1, max_size=4)) for _ in range(n)]}
    return doc


@given(problem_docs())
def test_round_trip(doc):
    problem = problem_from_dict(doc)
    again = parse_problem(dump_problem(problem))
    assert again == problem
    assert problem_to_dict(again) == problem_to_dict(problem)


def test_parse_rejects_duplicate_structure():
    with pytest.raises(ProblemFileError):
        problem_from_dict({"N": 1, "p": [1, 1, 1], "q": [1, 1], "f": {"shared": [0], "per_k": [[0]]}})
