import json

import numpy as np
import pandas as pd
import pytest

from conftest import synthetic_load
from pipeline import main

FAST = [
    "--epochs", "2",
    "--window-days", "3",
    "--mix-index", "1",
    "--seed", "5",
    "--set", "HIDDEN_DIM=3",
    "--set", "BATCH_SIZE=16",
    "--set", "PSO_PARTICLES=2",
    "--set", "PSO_ITERATIONS=1",
    "--set", "PSO_FITNESS_EPOCHS=1",
]


@pytest.fixture
def load_file(load_csv_file):
    return load_csv_file(synthetic_load(12, seed=2))


# ────────────────────────────────────────
# clean / decompose
# ────────────────────────────────────────

def test_clean_reports_single_spike(load_csv_file, tmp_path):
    values = np.full(5 * 24, 500.0)
    values[2 * 24 + 10] = 5000.0
    out = tmp_path / "clean"
    assert main(["clean", str(load_csv_file(values)), "--out-dir", str(out)]) == 0

    report = pd.read_csv(out / "report.csv")
    assert len(report) == 1
    assert report.loc[0, "original"] == 5000.0
    cleaned = pd.read_csv(out / "cleaned.csv")
    assert list(cleaned.columns) == ["timestamp", "load"]
    assert cleaned["load"].max() < 5000.0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "clean"
    assert len(manifest["inputs"]) == 1


def test_missing_input_exits_2_without_outputs(tmp_path):
    out = tmp_path / "out"
    assert main(["clean", str(tmp_path / "missing.csv"), "--out-dir", str(out)]) == 2
    assert not out.exists() or not any(out.iterdir())


def test_malformed_input_exits_2(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,load\n2024-01-01T00:00:00,1\n2024-01-01T05:00:00,2\n")
    assert main(["decompose", str(path), "--out-dir", str(tmp_path / "out")]) == 2


def test_decompose_columns_sum_to_input(load_file, tmp_path):
    out = tmp_path / "emd"
    assert main(["decompose", str(load_file), "--out-dir", str(out)]) == 0
    frame = pd.read_csv(out / "components.csv")
    assert frame.columns[0] == "timestamp"
    assert frame.columns[-1] == "res"
    original = pd.read_csv(load_file)["load"].to_numpy()
    np.testing.assert_allclose(frame.drop(columns="timestamp").sum(axis=1), original, rtol=1e-8)


# ────────────────────────────────────────
# train / predict / evaluate
# ────────────────────────────────────────

def _train(load_file, out, *extra) -> int:
    return main(["train", str(load_file), "--target-day", "12", "--out-dir", str(out), *FAST, *extra])


def test_train_writes_model_bundle(load_file, tmp_path):
    out = tmp_path / "models"
    assert _train(load_file, out) == 0
    meta = json.loads((out / "models.json").read_text(encoding="utf-8"))
    assert meta["variant"] == "emd_pso_lstm"
    count = len(meta["components"])
    assert sorted(p.name for p in out.glob("component_*.bin")) == sorted(
        f"component_{k}.bin" for k in range(1, count + 1)
    )
    losses = pd.read_csv(out / "loss_history.csv")
    assert len(losses) == 2 and losses.shape[1] == count + 1
    trace = pd.read_csv(out / "pso_trace.csv")
    assert len(trace) == count * (2 + 2 * 1)


def test_train_accepts_paper_pso_loop(load_file, tmp_path):
    out = tmp_path / "models"
    assert _train(load_file, out, "--pso-loop", "paper") == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["PSO_LOOP"] == "paper"
    count = len(json.loads((out / "models.json").read_text(encoding="utf-8"))["components"])
    assert len(pd.read_csv(out / "pso_trace.csv")) == count * (2 + 2 * 1)


def test_train_and_predict_are_bitwise_stable(load_file, tmp_path):
    runs = []
    for name in ("a", "b"):
        models = tmp_path / f"models_{name}"
        pred = tmp_path / f"pred_{name}"
        assert _train(load_file, models) == 0
        assert main(["predict", str(models), str(load_file), "--target-day", "12", "--out-dir", str(pred)]) == 0
        runs.append((models, pred))

    (models_a, pred_a), (models_b, pred_b) = runs
    for path in models_a.glob("component_*.bin"):
        assert path.read_bytes() == (models_b / path.name).read_bytes()
    assert (pred_a / "forecast.csv").read_bytes() == (pred_b / "forecast.csv").read_bytes()

    forecast = pd.read_csv(pred_a / "forecast.csv")
    assert len(forecast) == 24
    assert {"aggregate", "actual", "mape"} <= set(forecast.columns)
    assert (pred_a / "metrics.txt").read_text().startswith("hours=24")


def test_predict_reuses_training_config(load_file, tmp_path):
    models = tmp_path / "models"
    assert _train(load_file, models, "--variant", "lstm") == 0
    pred = tmp_path / "pred"
    assert main(["predict", str(models), str(load_file), "--out-dir", str(pred)]) == 0
    manifest = json.loads((pred / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["config"]["VARIANT"] == "lstm"
    assert manifest["config"]["WINDOW_DAYS"] == 3
    assert not (pred / "metrics.txt").exists()


def test_predict_missing_models_exits_2(load_file, tmp_path):
    assert main(["predict", str(tmp_path / "nothing"), str(load_file), "--out-dir", str(tmp_path / "p")]) == 2


def test_train_short_history_exits_2(load_csv_file, tmp_path):
    short = load_csv_file(synthetic_load(4))
    assert main(["train", str(short), "--out-dir", str(tmp_path / "m"), *FAST]) == 2


def test_evaluate_perfect_forecast(load_csv_file, tmp_path):
    actual = synthetic_load(1, seed=9)
    forecast = tmp_path / "forecast.csv"
    pd.DataFrame({"hour": np.arange(1, 25), "aggregate": actual}).to_csv(forecast, index=False, float_format="%.17g")
    actual_file = load_csv_file(actual, name="actual.csv")
    out = tmp_path / "eval"
    assert main(["evaluate", str(forecast), str(actual_file), "--out-dir", str(out)]) == 0
    lines = dict(line.split("=", 1) for line in (out / "metrics.txt").read_text().splitlines())
    assert float(lines["mape_mean"]) == 0.0
    assert float(lines["accuracy"]) == 100.0
    assert len(pd.read_csv(out / "evaluation.csv")) == 24


def test_evaluate_zero_actual_exits_2(load_csv_file, tmp_path):
    forecast = tmp_path / "forecast.csv"
    pd.DataFrame({"hour": np.arange(1, 25), "aggregate": np.ones(24)}).to_csv(forecast, index=False)
    actual = np.ones(24)
    actual[3] = 0.0
    assert main(["evaluate", str(forecast), str(load_csv_file(actual)), "--out-dir", str(tmp_path / "e")]) == 2


# ────────────────────────────────────────
# compare / sweep
# ────────────────────────────────────────

def test_compare_two_variants(load_file, tmp_path):
    out = tmp_path / "cmp"
    code = main(["compare", str(load_file), "--variants", "lstm,gru", "--baseline", "--out-dir", str(out), *FAST])
    assert code == 0
    summary = pd.read_csv(out / "comparison_summary.csv", keep_default_na=False)
    assert summary["setting"].tolist() == ["lstm", "gru", "persistence"]
    hourly = pd.read_csv(out / "comparison.csv")
    assert len(hourly) == 25
    assert "lstm_forecast" in hourly.columns and "gru_mape" in hourly.columns


def test_sweep_window(load_file, tmp_path):
    out = tmp_path / "sweep"
    code = main(
        ["sweep", str(load_file), "--kind", "window", "--values", "2,3", "--variant", "lstm",
         "--out-dir", str(out), *FAST]
    )
    assert code == 0
    summary = pd.read_csv(out / "sweep_window_summary.csv")
    assert summary["setting"].tolist() == ["2-1", "3-1"]


# ────────────────────────────────────────
# 사용법 / 설정 오류
# ────────────────────────────────────────

@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["unknown-command"],
        ["compare", "x.csv", "--variants", "transformer"],
        ["sweep", "x.csv", "--kind", "window", "--values", "a,b"],
    ],
)
def test_usage_errors_exit_1(argv):
    assert main(argv) == 1


@pytest.mark.parametrize("assignment", ["HIDDEN_DIM=abc", "NOT_A_KEY=1", "CLEAN_ALPHA=0.9"])
def test_bad_config_values_exit_1(load_file, tmp_path, assignment):
    assert main(["clean", str(load_file), "--set", assignment, "--out-dir", str(tmp_path / "o")]) == 1


def test_missing_config_file_exits_2(load_file, tmp_path):
    code = main(["clean", str(load_file), "--config", str(tmp_path / "none.env"), "--out-dir", str(tmp_path / "o")])
    assert code == 2
