import json

import numpy as np
import pytest

from weakgroup import __version__
from weakgroup.cli import main
from weakgroup.matrixio import Format, parse_matrix, write_matrix
from weakgroup.relations import EXAMPLE_A, EXAMPLE_B, EXAMPLE_C


@pytest.fixture
def files(tmp_path, pair):
    paths = {}
    for name, M in dict(example31_A=EXAMPLE_A, example31_B=EXAMPLE_B, example31_C=EXAMPLE_C,
                        a=pair.A, w=pair.W, zero=np.zeros_like(pair.W)).items():
        paths[name] = str(tmp_path / f"{name}.json")
        write_matrix(paths[name], M)
    paths["example31_A.mm"] = str(tmp_path / "example31_A.mm")
    write_matrix(paths["example31_A.mm"], EXAMPLE_A, Format.MATRIX_MARKET)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_compute_wg_example(capsys, files):
    code, rep, _ = run(capsys, "compute", "wg", "-A", files["example31_A"])
    assert code == 0 and rep["status"] == "pass"
    X = parse_matrix(json.dumps(rep["outputs"]["X"])).matrix
    np.testing.assert_allclose(X, [[1, 1, 1], [0, 0, 0], [0, 0, 0]], atol=1e-12)
    assert rep["version"] == __version__
    assert len(rep["inputs"]["A"]["sha256"]) == 64
    assert set(rep["residuals"]) == set(rep["verdicts"])


def test_relation_false_exits_one(capsys, files):
    code, rep, _ = run(capsys, "relation", "wg", "-A", files["example31_A"],
                       "-B", files["example31_C"])
    assert code == 1
    assert rep["outputs"]["holds"] is False and rep["status"] == "fail"
    assert rep["residuals"]["second_equation"] > 0.1


def test_relation_true_exits_zero(capsys, files):
    code, rep, _ = run(capsys, "relation", "wg", "-A", files["example31_A"],
                       "-B", files["example31_B"], "--method", "BLOCK")
    assert code == 0 and rep["outputs"]["holds"] is True


def test_zero_weight_exits_two(capsys, files):
    code, rep, err = run(capsys, "compute", "wwg", "-A", files["a"], "-W", files["zero"])
    assert code == 2 and rep is None
    assert "ZeroWeight" in err


@pytest.mark.parametrize("kind", ["mp", "drazin", "coreep", "wg"])
def test_compute_unweighted_kinds(capsys, files, kind):
    code, rep, _ = run(capsys, "compute", kind, "-A", files["example31_A.mm"])
    assert code == 0 and all(rep["verdicts"].values())


@pytest.mark.parametrize("kind", ["wdrazin", "wcoreep", "wwg"])
def test_compute_weighted_kinds(capsys, files, kind):
    code, rep, _ = run(capsys, "compute", kind, "-A", files["a"], "-W", files["w"])
    assert code == 0 and all(rep["verdicts"].values())


def test_compute_outer(capsys, files, tmp_path):
    T = str(tmp_path / "T.json")
    write_matrix(T, np.eye(3)[:, :1])
    code, rep, _ = run(capsys, "compute", "outer", "-A", files["example31_A"], "-T", T,
                       "-S", files["example31_C"])
    assert code == 0
    X = parse_matrix(json.dumps(rep["outputs"]["X"])).matrix
    np.testing.assert_allclose(X @ EXAMPLE_A @ X, X, atol=1e-12)


def test_index_too_large_is_input_error(capsys, files):
    code, _, err = run(capsys, "compute", "group", "-A", files["example31_A"])
    assert code == 2 and "IndexTooLarge" in err


def test_weighted_kind_without_weight(capsys, files):
    code, _, err = run(capsys, "compute", "wwg", "-A", files["a"])
    assert code == 2 and "-W" in err


def test_routes_and_canon(capsys, files):
    code, rep, _ = run(capsys, "routes", "-A", files["a"], "-W", files["w"])
    assert code == 0 and len(rep["outputs"]["routes"]) == 11
    code, rep, _ = run(capsys, "canon", "-A", files["a"], "-W", files["w"])
    assert code == 0 and rep["outputs"]["core_dim"] == 3


def test_verify(capsys, files):
    code, rep, _ = run(capsys, "verify", "thm-representations", "-A", files["a"],
                       "-W", files["w"])
    assert code == 0 and rep["outputs"]["holds"] is True
    code, rep, _ = run(capsys, "verify", "rel-preorder", "-A", files["example31_A"],
                       "-B", files["example31_B"], "-C", files["example31_C"])
    assert code == 0 and rep["verdicts"]["transitivity_violation"] is True
    code, _, err = run(capsys, "verify", "thm-bogus", "-A", files["a"])
    assert code == 2 and "thm-defining-system" in err


def test_verify_help_lists_theorem_ids(capsys):
    assert main(["verify", "--help"]) == 0
    out = capsys.readouterr().out
    assert "rel-right-block" in out and "thm-commutation" in out


def test_format_mm_embeds_matrix_market(capsys, files):
    code, rep, _ = run(capsys, "--format", "mm", "compute", "wg", "-A", files["example31_A"])
    assert code == 0
    assert rep["outputs"]["X"].startswith("%%MatrixMarket matrix array complex general")


def test_global_tolerance_reaches_report(capsys, files):
    _, rep, _ = run(capsys, "--tol", "1e-6", "compute", "wg", "-A", files["example31_A"])
    assert rep["tolerances"]["eq_rtol"] == 1e-6
    _, rep, _ = run(capsys, "compute", "wg", "-A", files["example31_A"], "--tol", "1e-5")
    assert rep["tolerances"]["eq_rtol"] == 1e-5


def test_out_flag_and_determinism(capsys, files, tmp_path):
    first, second = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["compute", "wwg", "-A", files["a"], "-W", files["w"], "--out", str(first)]) == 0
    assert main(["compute", "wwg", "-A", files["a"], "-W", files["w"], "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert capsys.readouterr().out == ""


def test_usage_errors_exit_two(capsys, files):
    assert main(["compute", "bogus", "-A", files["a"]]) == 2
    assert main([]) == 2
    assert main(["compute", "wg", "-A", "/nonexistent/file.json"]) == 2


def test_parse_error_exit_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"rows": 2, "cols": 2, "entries": [[1, 0]]}')
    code, _, err = run(capsys, "compute", "mp", "-A", str(bad))
    assert code == 2 and "ShapeError" in err


def test_conform_small(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps([{"core_dim": 2, "nil_dim_x": 1, "nil_dim_y": 2},
                                {"core_dim": 3, "plant": ["COMMUTING_CONDITION"]}]))
    code, rep, _ = run(capsys, "conform", "--trials", "4", "--seed", "1", "--spec", str(spec))
    assert code == 0 and rep["status"] == "pass"
    assert rep["outputs"]["suite"]["trials"] == 4
    assert "spec" in rep["inputs"]


def test_conform_bad_spec(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('[{"core_dim": 0}]')
    code, _, err = run(capsys, "conform", "--trials", "2", "--spec", str(spec))
    assert code == 2
