import json

import pytest

from orbhae.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, depth_floor, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_intersection(capsys):
    code, out, _ = run(capsys, "intersection", "--genus", "2", "--exps", "4")
    assert code == EXIT_OK and out.strip() == "1/1152"
    code, out, _ = run(capsys, "intersection", "--genus", "1", "--exps", "1", "--emit", "json")
    assert json.loads(out)["value"] == "1/24"


def test_intersection_unstable_is_usage_error(capsys):
    code, _, err = run(capsys, "intersection", "--genus", "0", "--exps", "0,0")
    assert code == EXIT_USAGE and "unstable" in err


def test_graphs(capsys):
    code, out, _ = run(capsys, "graphs", "--genus", "2", "--emit", "json")
    assert code == EXIT_OK and len(json.loads(out)) == 7
    code, out, _ = run(capsys, "graphs", "--genus", "2", "--decorated", "--emit", "json")
    assert len(json.loads(out)) == 85


def test_mirror_series_json(capsys):
    code, out, _ = run(capsys, "mirror-series", "--order", "12", "--emit", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["order"] == 12
    assert data["series"]["C1"]["coeffs"][6] == "-1/375000"
    assert set(data["series"]) >= {"T", "L", "A1", "A2", "I0", "B4"}


def test_verify_identities(capsys):
    code, out, _ = run(capsys, "verify-identities", "--emit", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert all(c["residual_zero"] for c in data["checks"])
    assert {"name", "residual_zero", "detail"} == set(data["checks"][0])


def test_rmatrix(capsys):
    code, out, _ = run(capsys, "rmatrix", "--emit", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["max_k"] == 8
    assert all(c["residual_zero"] for c in data["checks"])


def test_rmatrix_poisoned_fails(capsys):
    code, out, _ = run(capsys, "rmatrix", "--poison-constant")
    assert code == EXIT_FAIL
    assert "FAIL  rmatrix: symplectic (sym)" in out


def test_potential_json_schema(capsys):
    code, out, _ = run(capsys, "potential", "--genus", "1", "--insertions", "1", "--emit", "json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert set(data) == {"genus", "insertions", "ring_element", "series", "checks", "coefficient_field"}
    assert data["genus"] == 1 and data["insertions"] == [1]
    assert data["checks"][0]["residual_zero"]
    assert data["series"]["coeffs"][9] == "97/10125000000"


def test_gw(capsys):
    code, out, _ = run(capsys, "gw", "--genus", "1", "--insertions", "1", "--max-degree", "14",
                       "--emit", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["rational"]
    assert data["coefficients"][9] == "1358/390625"


def test_depth_error_names_minimal_k(capsys):
    code, _, err = run(capsys, "potential", "--genus", "3", "--max-k", "4")
    assert code == EXIT_USAGE
    assert f"max-k >= {depth_floor(3)}" in err


def test_order_floor(capsys):
    code, _, err = run(capsys, "verify-hae", "--genus", "3", "--order", "20")
    assert code == EXIT_USAGE and "floor" in err


def test_bad_arguments(capsys):
    assert run(capsys, "nonsense")[0] == EXIT_USAGE
    assert run(capsys, "potential", "--genus", "1", "--insertions", "7")[0] == EXIT_USAGE
    assert run(capsys, "rmatrix", "--poison-constant", "2,9,1")[0] == EXIT_USAGE
    assert run(capsys, "verify-hae", "--genus", "1")[0] == EXIT_USAGE


def test_cache_gives_identical_output(capsys, tmp_path):
    argv = ["potential", "--genus", "2", "--insertions", "4", "--emit", "json", "--cache-dir", str(tmp_path)]
    code1, first, _ = run(capsys, *argv)
    assert any(tmp_path.iterdir())
    code2, second, _ = run(capsys, *argv)
    assert code1 == code2 == EXIT_OK
    assert first == second


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("ORBHAE_CACHE_DIR", str(tmp_path))
    code, _, _ = run(capsys, "rmatrix")
    assert code == EXIT_OK and any(tmp_path.iterdir())


def test_verify_hae_reports_each_equation(capsys):
    code, out, _ = run(capsys, "verify-hae", "--genus", "2", "--emit", "json")
    names = [c["name"] for c in json.loads(out)["checks"]]
    assert names == ["HAE (A2) g=2: ring", "HAE (A2) g=2: series through x^40",
                     "HAE (D2A1) g=2: ring", "HAE (D2A1) g=2: series through x^40"]
    assert code in (EXIT_OK, EXIT_FAIL)
