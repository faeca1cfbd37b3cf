import json

import numpy as np
import pytest
from click.testing import CliRunner

from mspreg import load_dataset_csv
from mspreg.experiments import synthetic_prices
from mspreg.experiments.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def test_simulate_outputs_and_determinism(runner, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    args = ["simulate", "--scenario", "2", "--n", "30", "--p", "12", "--seed", "5"]
    invoke(runner, args + ["--out", str(out_a)])
    invoke(runner, args + ["--out", str(out_b)])
    for name in ("data.csv", "truth.csv", "manifest.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    data = load_dataset_csv(out_a / "data.csv")
    assert data.n == 30 and data.p == 12
    truth_lines = (out_a / "truth.csv").read_text().splitlines()
    assert truth_lines[0] == "variable,beta"
    assert len(truth_lines) == 13
    manifest = json.loads((out_a / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["params"]["seed"] == 5


def test_path_csv_schema(runner, tmp_path):
    out = tmp_path / "path"
    invoke(runner, ["path", "--scenario", "1", "--n", "40", "--p", "10", "--method", "msp",
                    "--grid-size", "5", "--seed", "1", "--out", str(out)])
    lines = (out / "path.csv").read_text().splitlines()
    assert lines[0] == "lambda,variable,value,class"
    assert len(lines) == 1 + 5 * 10
    classes = {line.split(",")[3] for line in lines[1:]}
    assert classes == {"relevant", "engineered", "irrelevant"}


def test_bench_csv(runner, tmp_path):
    out = tmp_path / "bench"
    invoke(runner, ["bench", "--scenario", "2", "--n", "40", "--p", "10",
                    "--methods", "msp,lasso", "--reps", "2", "--grid-size", "8",
                    "--folds", "5", "--seed", "3", "--out", str(out)])
    lines = (out / "bench.csv").read_text().splitlines()
    assert lines[0] == "method,l2,l1,NZ,FPR,TPR"
    assert lines[1].startswith("msp,")
    assert lines[2].startswith("lasso,")


def test_bench_deterministic_bytes(runner, tmp_path):
    args = ["bench", "--scenario", "1", "--n", "40", "--p", "10", "--methods", "msp",
            "--reps", "2", "--grid-size", "6", "--folds", "5", "--seed", "7"]
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    invoke(runner, args + ["--out", str(out_a)])
    invoke(runner, args + ["--out", str(out_b)])
    assert (out_a / "bench.csv").read_bytes() == (out_b / "bench.csv").read_bytes()


def test_cv_reports_selection(runner, tmp_path):
    out = tmp_path / "cv"
    result = invoke(runner, ["cv", "--scenario", "1", "--n", "40", "--p", "10",
                             "--method", "lasso", "--grid-size", "8", "--folds", "5",
                             "--seed", "2", "--out", str(out)])
    assert "selected lambda" in result.output
    lines = (out / "cv.csv").read_text().splitlines()
    assert lines[0] == "lambda,mean_sq_error"
    assert len(lines) == 9
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["params"]["selected_lambda"] > 0


def test_robustness_csv(runner, tmp_path):
    out = tmp_path / "rob"
    invoke(runner, ["robustness", "--scenario", "2", "--n", "40", "--p", "10",
                    "--lambdas", "0.5,1.0", "--reps", "2", "--seed", "4",
                    "--out", str(out)])
    lines = (out / "robustness.csv").read_text().splitlines()
    assert lines[0] == "lambda,mean_l2,sd_l2"
    assert len(lines) == 3


def test_track_pipeline(runner, tmp_path):
    frame = synthetic_prices(130, 8, seed=9)
    prices = tmp_path / "prices.csv"
    frame.to_csv(prices, index=False)
    out = tmp_path / "track"
    result = invoke(runner, ["track", "--prices", str(prices), "--method", "lasso",
                             "--k", "4", "--grid-size", "12", "--out", str(out)])
    lines = (out / "windows.csv").read_text().splitlines()
    assert lines[0] == ("window,train_start,test_start,test_end,lambda,nz,"
                        "fitted_error,predicted_error")
    assert len(lines) == 2  # 130 days -> one window
    assert "mean predicted error" in result.output


def test_unknown_method_rejected(runner, tmp_path):
    result = runner.invoke(main, ["path", "--method", "ridge", "--out", str(tmp_path)])
    assert result.exit_code != 0
