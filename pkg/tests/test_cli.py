import json

import numpy as np
import pytest

from pinchtrace.cha import cha_pair
from pinchtrace.cli import run_cli
from pinchtrace.numeric import matrix_to_json, random_psd


def _lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.strip()]


def _write(tmp_path, name, M):
    p = tmp_path / name
    p.write_text(json.dumps(matrix_to_json(M)))
    return str(p)


def test_cha_exact(capsys):
    assert run_cli(["cha", "--x", "1/1000", "--mode", "exact", "--json"]) == 0
    (row,) = _lines(capsys)
    assert row["pinched"] == row["closed_form"]["pinched"] == "2005010010005001/1000000000000000000000000000000"
    assert row["average"] == row["closed_form"]["average"]
    assert row["clustered"] == row["closed_form"]["clustered"]
    assert all(row["ordering"].values())


def test_cha_scan(capsys):
    assert run_cli(["cha", "--scan", "1e-3,1e-6", "--json"]) == 0
    rows = _lines(capsys)
    assert abs(rows[1]["normalized"] - 1) < 0.01


def test_sandwich_exit_zero(capsys):
    assert run_cli(["sandwich", "--dim", "4", "--n", "6", "--trials", "100", "--seed", "1", "--json"]) == 0
    rows = _lines(capsys)
    assert len(rows) == 100 and all(r["lower_margin"] >= -1e-10 * r["clustered"] for r in rows)


def test_sandwich_failure_exit_three(capsys):
    # an absurdly negative tolerance turns every equality-free margin into a failure
    assert run_cli(["sandwich", "--dim", "3", "--n", "2", "--trials", "2", "--seed", "1", "--tol", "-1"]) == 3


def test_poly_methods_agree(tmp_path, capsys):
    a = _write(tmp_path, "a.json", random_psd(3, "isotropic", 1))
    b = _write(tmp_path, "b.json", random_psd(3, "isotropic", 2))
    out = {}
    for method in ("enum", "poly", "comp"):
        assert run_cli(["poly", "--matrix-a", a, "--matrix-b", b, "--n", "5", "--m", "5",
                        "--method", method, "--json"]) == 0
        out[method] = _lines(capsys)[0]["average"]
    assert out["enum"] == pytest.approx(out["poly"], rel=1e-12)
    assert out["comp"] == pytest.approx(out["poly"], rel=1e-12)


def test_poly_exact_strings(tmp_path, capsys):
    inst = cha_pair("1/10")
    a, b = _write(tmp_path, "a.json", inst.A), _write(tmp_path, "b.json", inst.B)
    for method in ("enum", "poly"):
        assert run_cli(["poly", "--matrix-a", a, "--matrix-b", b, "--n", "5", "--m", "5",
                        "--mode", "exact", "--method", method, "--json"]) == 0
    r1, r2 = _lines(capsys)
    assert r1["average"] == r2["average"] and "/" in r1["average"]


def test_bridges(tmp_path, capsys):
    inst = cha_pair("1/1000")
    a, b = _write(tmp_path, "a.json", inst.A), _write(tmp_path, "b.json", inst.B)
    assert run_cli(["bridges", "--matrix-a", a, "--matrix-b", b, "--n", "5", "--m", "5",
                    "--top", "4", "--json"]) == 0
    (row,) = _lines(capsys)
    assert len(row["cycles"]) == 4
    assert row["total_averaged"] == row["average"]


def test_pinch_and_upper_tests_write_file(tmp_path):
    out = tmp_path / "r.jsonl"
    assert run_cli(["pinch-test", "--trials", "10", "--seed", "3", "--m", "3", "--out", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(rows) == 11 and rows[-1]["summary"] and rows[-1]["violations"] == 0
    assert run_cli(["upper-test", "--trials", "5", "--seed", "3", "--out", str(out)]) == 0


def test_search_from_cha(capsys):
    assert run_cli(["search", "--seed", "1", "--iterations", "50", "--restarts", "1",
                    "--init-cha", "1/1000"]) == 0
    (row,) = _lines(capsys)
    assert row["best_objective"] >= 1.593 and row["clustered_violated"]
    assert row["matrix_a"]["mode"] == "float"


def test_usage_and_contract_codes(tmp_path):
    assert run_cli(["frobnicate"]) == 64
    assert run_cli(["pinch-test", "--trials", "3"]) == 64  # --seed is mandatory
    assert run_cli(["cha", "--x", "0"]) == 2
    small = _write(tmp_path, "s.json", np.eye(2))
    big = _write(tmp_path, "b.json", np.eye(7))
    assert run_cli(["poly", "--matrix-a", small, "--matrix-b", big, "--n", "1", "--m", "1"]) == 2
    assert run_cli(["bridges", "--matrix-a", big, "--matrix-b", big, "--n", "1", "--m", "7"]) == 2
    assert run_cli(["poly", "--matrix-a", str(tmp_path / "missing.json"), "--matrix-b", small,
                    "--n", "1", "--m", "1"]) == 2
