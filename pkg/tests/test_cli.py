import csv
import json

import numpy as np
import pytest

from quadreg.cli import main
from quadreg.core import Dataset, compute_precomputation, objective
from quadreg.io import (DataFormatError, matrix_to_triplets, read_data_csv, read_matrix_json,
                        triplets_to_matrix, write_data_csv, write_matrix_json)
from quadreg.penalty import PenaltySpec, lambda_max
from quadreg.simulate import SimSpec, simulate


@pytest.fixture
def sim_csv(tmp_path):
    def _make(n=60, p=10, model=3, seed=1):
        path = tmp_path / f"data_{n}_{p}_{seed}.csv"
        truth = tmp_path / f"truth_{n}_{p}_{seed}.json"
        assert main(["simulate", "--model", str(model), "--n", str(n), "--p", str(p),
                     "--seed", str(seed), "--out", str(path), "--truth-out", str(truth)]) == 0
        return path, truth
    return _make


def load_json(path):
    return json.loads(path.read_text())


def test_simulate_is_reproducible(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["simulate", "--model", "1", "--n", "20", "--p", "10", "--seed", "9",
                     "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    X, y, header = read_data_csv(paths[0])
    assert header[:2] == ["y", "x1"] and X.shape == (20, 10)
    Xs, ys, _ = simulate(SimSpec(1, 20, 10, seed=9))
    np.testing.assert_array_equal(X, Xs)
    np.testing.assert_array_equal(y, ys)


def test_ridge_matches_library(sim_csv, tmp_path):
    data, _ = sim_csv(n=50, p=29)
    outs = {}
    for v in ("structured", "woodbury"):
        out = tmp_path / f"{v}.json"
        assert main(["ridge", "--data", str(data), "--lambda", "2.5", "--variant", v,
                     "--out", str(out)]) == 0
        outs[v] = read_matrix_json(out)
        assert load_json(out)["p"] == 30
    np.testing.assert_allclose(outs["structured"], outs["woodbury"], atol=1e-8, rtol=0)


def test_ridge_guard_exit_code(sim_csv, capsys):
    data, _ = sim_csv(n=20, p=70)
    assert main(["ridge", "--data", str(data), "--lambda", "1", "--variant", "naive"]) == 2
    assert "too large" in capsys.readouterr().err


def test_fit_at_lambda_max_is_empty(sim_csv, tmp_path):
    data, _ = sim_csv()
    X, y, _ = read_data_csv(data)
    ds = Dataset.from_raw(X, y)
    pre = compute_precomputation(ds)
    lmax = lambda_max(PenaltySpec.preset("l1", 1.0), pre, ds)
    out = tmp_path / "fit.json"
    assert main(["fit", "--data", str(data), "--penalty", "l1", "--lambda1", str(lmax * 1.01),
                 "--out", str(out)]) == 0
    obj = load_json(out)
    assert {(j, k) for j, k, v in obj["entries"] if abs(v) > 1e-6} <= {(0, 0)}
    assert obj["converged"] is True


def test_fit_objective_is_consistent(sim_csv, tmp_path):
    data, _ = sim_csv()
    out = tmp_path / "fit.json"
    assert main(["fit", "--data", str(data), "--penalty", "l1+l2", "--lambda1", "0.3",
                 "--lambda2", "0.5", "--out", str(out)]) == 0
    obj = load_json(out)
    X, y, _ = read_data_csv(data)
    B = triplets_to_matrix(obj)
    spec = PenaltySpec.preset("l1+l2", 0.3, 0.5)
    assert obj["objective"] == pytest.approx(objective(Dataset.from_raw(X, y), B, spec), rel=1e-12)


def test_fit_strict_nonconvergence(sim_csv):
    data, _ = sim_csv()
    args = ["fit", "--data", str(data), "--penalty", "l1", "--lambda1", "0.1", "--max-iter", "1"]
    assert main(args + ["--out", "-"]) == 0
    assert main(args + ["--strict"]) == 3


def test_path_csv(sim_csv, tmp_path):
    data, truth = sim_csv()
    out = tmp_path / "path.csv"
    assert main(["path", "--data", str(data), "--penalty", "l1+l2", "--n-lambda", "10",
                 "--n-alpha", "10", "--truth", str(truth), "--max-iter", "50",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 100
    assert list(rows[0]) == ["alpha", "lambda", "lambda1", "lambda2", "objective", "iters",
                             "converged", "support_size", "csi"]
    assert all(0 <= float(r["csi"]) <= 1 for r in rows)


def test_path_truth_shape_mismatch(sim_csv, tmp_path):
    data, _ = sim_csv()
    bad = tmp_path / "t.json"
    write_matrix_json(bad, np.eye(3))
    assert main(["path", "--data", str(data), "--penalty", "l1", "--truth", str(bad)]) == 2


def test_bench_rows(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--variants", "structured,woodbury", "--n", "30", "--p", "10,12",
                 "--reps", "2", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["variant", "n", "p", "mean_seconds", "sd_seconds"]
    assert len(rows) == 5
    assert all(float(r[3]) > 0 for r in rows[1:])


def test_bench_guard_gives_na(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["bench", "--variants", "naive", "--n", "20", "--p", "70", "--reps", "1",
                 "--out", str(out)]) == 0
    assert list(csv.reader(out.open()))[1][3:] == ["NA", "NA"]


@pytest.mark.parametrize("content, line", [
    ("y,x1\n1,2\n3,abc\n", 3),
    ("1,2\n3\n", 2),
    ("1,2\n3,nan\n", 2),
])
def test_bad_csv(tmp_path, capsys, content, line):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(DataFormatError, match=f"line {line}"):
        read_data_csv(path)
    assert main(["ridge", "--data", str(path), "--lambda", "1"]) == 2
    assert f"line {line}" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["ridge", "--data", str(tmp_path / "nope.csv"), "--lambda", "1"]) == 2


@pytest.mark.parametrize("argv", [
    [],
    ["ridge", "--lambda", "1"],
    ["ridge", "--data", "x.csv", "--lambda", "-1"],
    ["fit", "--data", "x.csv", "--penalty", "bogus", "--lambda1", "1"],
    ["simulate", "--model", "1", "--n", "10", "--p", "5", "--out", "x.csv"],
])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_triplet_round_trip(tmp_path, rng):
    B = rng.standard_normal((5, 5))
    B = B + B.T
    B[1, 3] = B[3, 1] = 0.0
    obj = matrix_to_triplets(B)
    assert all(j <= k for j, k, _ in obj["entries"]) and len(obj["entries"]) == 14
    write_matrix_json(tmp_path / "m.json", B, note="x")
    np.testing.assert_array_equal(read_matrix_json(tmp_path / "m.json"), B)
    with pytest.raises(DataFormatError):
        triplets_to_matrix({"p": 2, "entries": [[1, 0, 1.0]]})


def test_write_read_data_round_trip(tmp_path, rng):
    X, y = rng.standard_normal((7, 3)), rng.standard_normal(7)
    write_data_csv(tmp_path / "d.csv", X, y)
    X2, y2, _ = read_data_csv(tmp_path / "d.csv")
    np.testing.assert_array_equal(X, X2)
    np.testing.assert_array_equal(y, y2)
    (tmp_path / "n.csv").write_text("1.5,2\n-3,4e-1\n")
    X3, y3, header = read_data_csv(tmp_path / "n.csv")
    assert header is None and y3.tolist() == [1.5, -3.0] and X3.ravel().tolist() == [2.0, 0.4]
