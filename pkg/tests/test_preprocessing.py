import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from preprocessing import (
    CleaningConfig,
    CleaningStats,
    LoadMatrix,
    LoadSeries,
    NormalizationParams,
    as_sequences,
    build_windows,
    clean_matrix,
    denormalize,
    detect_outliers,
    load_csv,
    normalize,
    revise_point,
    split_target_day,
)
from utils.errors import DataError, DegenerateRangeError, InsufficientHistoryError, ShapeMismatchError


# ────────────────────────────────────────
# CSV 로드
# ────────────────────────────────────────

def test_load_csv_three_rows(tmp_path):
    path = tmp_path / "three.csv"
    path.write_text(
        "timestamp,load\n"
        "2024-01-01T00:00:00,700.5\n"
        "2024-01-01T01:00:00,710\n"
        "2024-01-01T02:00:00,695.25\n"
    )
    series = load_csv(path)
    assert len(series) == 3
    np.testing.assert_array_equal(series.values, [700.5, 710.0, 695.25])
    assert series.start_timestamp == pd.Timestamp("2024-01-01T00:00:00")


def test_load_csv_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(DataError, match="no data rows"):
        load_csv(path)


def test_load_csv_header_only(tmp_path):
    path = tmp_path / "header.csv"
    path.write_text("timestamp,load\n")
    with pytest.raises(DataError, match="no data rows"):
        load_csv(path)


def test_load_csv_duplicated_timestamp_names_line(tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text(
        "timestamp,load\n"
        "2024-01-01T00:00:00,1\n"
        "2024-01-01T01:00:00,2\n"
        "2024-01-01T01:00:00,3\n"
    )
    with pytest.raises(DataError, match="line 4"):
        load_csv(path)


def test_load_csv_gap_rejected(tmp_path):
    path = tmp_path / "gap.csv"
    path.write_text(
        "timestamp,load\n"
        "2024-01-01T00:00:00,1\n"
        "2024-01-01T03:00:00,2\n"
    )
    with pytest.raises(DataError, match="non-hourly gap at line 3"):
        load_csv(path)


def test_load_csv_backwards_timestamp_names_line(tmp_path):
    path = tmp_path / "backwards.csv"
    path.write_text(
        "timestamp,load\n"
        "2024-01-01T00:00:00,1\n"
        "2024-01-01T02:00:00,2\n"
        "2024-01-01T01:00:00,3\n"
    )
    with pytest.raises(DataError, match="non-monotone timestamp at line 4"):
        load_csv(path)


def test_load_csv_unparseable_value(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,load\n2024-01-01T00:00:00,abc\n")
    with pytest.raises(DataError, match="line 2"):
        load_csv(path)


def test_load_csv_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv")


def test_split_target_day_defaults_to_last_day(make_series):
    series = make_series(days=5)
    history, actual = split_target_day(series)
    assert history.days == 4
    np.testing.assert_array_equal(actual, series.values[96:120])

    with pytest.raises(DataError):
        split_target_day(series, 1)


def test_matrix_requires_whole_days():
    with pytest.raises(DataError):
        LoadMatrix.from_values(np.ones(25))
    with pytest.raises(ShapeMismatchError):
        LoadMatrix(np.ones((2, 23)))


# ────────────────────────────────────────
# 불량 데이터 정제
# ────────────────────────────────────────

def _spiked_matrix() -> LoadMatrix:
    grid = np.full((5, 24), 500.0)
    grid[2, 10] = 5000.0
    return LoadMatrix(grid)


def test_detect_single_spike():
    stats = detect_outliers(_spiked_matrix(), CleaningConfig())
    assert stats.flagged == [(2, 10)]


def test_detect_constant_matrix():
    stats = detect_outliers(LoadMatrix(np.full((3, 24), 42.0)), CleaningConfig())
    assert stats.flagged == []
    assert stats.stddev == 0.0


def test_detect_huge_epsilon_flags_nothing():
    stats = detect_outliers(_spiked_matrix(), CleaningConfig(epsilon=1e12))
    assert stats.flagged == []


def test_flagged_cells_shrink_as_epsilon_grows(rng):
    grid = 600.0 + 40.0 * rng.standard_t(df=2, size=(20, 24))
    matrix = LoadMatrix(grid)
    epsilons = [0.2, 0.4, 0.7, 1.0, 1.5, 3.0]
    flagged = [set(detect_outliers(matrix, CleaningConfig(epsilon=e)).flagged) for e in epsilons]
    assert flagged[0]
    for looser, stricter in zip(flagged, flagged[1:]):
        assert stricter <= looser


def test_revise_point_arithmetic():
    grid = np.full((3, 24), 700.0)
    grid[0, 5], grid[2, 5] = 700.0, 710.0
    grid[1, 4], grid[1, 6] = 690.0, 705.0
    stats = CleaningStats(mean=700.0, stddev=1.0)
    value = revise_point(LoadMatrix(grid), 1, 5, CleaningConfig(), stats)
    assert value == pytest.approx(701.0, abs=1e-9)


def test_revise_point_gamma_only_returns_mean():
    cfg = CleaningConfig(alpha=0.0, beta=0.0, gamma=1.0)
    stats = CleaningStats(mean=612.5, stddev=3.0)
    assert revise_point(_spiked_matrix(), 2, 10, cfg, stats) == 612.5


def test_revise_point_equal_neighbors():
    cfg = CleaningConfig(alpha=0.3, beta=0.7, gamma=0.0)
    grid = np.full((3, 24), 640.0)
    grid[1, 7] = 9999.0
    stats = CleaningStats(mean=0.0, stddev=1.0)
    assert revise_point(LoadMatrix(grid), 1, 7, cfg, stats) == pytest.approx(640.0)


def test_revise_point_boundary_uses_single_neighbor_twice():
    grid = np.arange(48, dtype=np.float64).reshape(2, 24)
    cfg = CleaningConfig(alpha=1.0, beta=0.0, gamma=0.0)
    stats = CleaningStats(mean=0.0, stddev=1.0)
    # 첫째 날: 같은 시간대 이웃은 다음 날 하나뿐
    assert revise_point(LoadMatrix(grid), 0, 3, cfg, stats) == pytest.approx(grid[1, 3])


def test_revise_point_outside_matrix():
    with pytest.raises(IndexError):
        revise_point(_spiked_matrix(), 5, 0, CleaningConfig(), CleaningStats(500.0, 1.0))


def test_clean_matrix_reports_one_row():
    report = clean_matrix(_spiked_matrix(), CleaningConfig())
    assert len(report.rows) == 1
    assert report.matrix.grid[2, 10] < 5000.0
    assert list(report.to_frame().columns) == ["day", "hour", "original", "revised"]


def test_clean_matrix_is_idempotent_on_clean_data(make_series):
    matrix = make_series(days=10, noise=0.0).to_matrix()
    report = clean_matrix(matrix, CleaningConfig())
    assert report.rows == []
    np.testing.assert_array_equal(report.matrix.grid, matrix.grid)


def test_revision_is_stable_at_fixed_stats(rng):
    grid = 650.0 + 25.0 * rng.standard_normal((6, 24))
    grid[3, 7] = 4000.0
    matrix = LoadMatrix(grid)
    cfg = CleaningConfig()
    stats = detect_outliers(matrix, cfg)
    assert stats.flagged == [(3, 7)]

    first = revise_point(matrix, 3, 7, cfg, stats)
    revised = grid.copy()
    revised[3, 7] = first
    assert revise_point(LoadMatrix(revised), 3, 7, cfg, stats) == first

    report = clean_matrix(matrix, cfg)
    assert report.matrix.grid[3, 7] == first


def test_cleaning_weights_must_sum_to_one():
    with pytest.raises(ValidationError):
        CleaningConfig(alpha=0.5, beta=0.5, gamma=0.5)
    with pytest.raises(ValidationError):
        CleaningConfig(epsilon=0.0)


# ────────────────────────────────────────
# 정규화 / 윈도우
# ────────────────────────────────────────

def test_normalize_endpoints_and_midpoint():
    params = NormalizationParams(600.0, 800.0)
    np.testing.assert_allclose(normalize([600.0, 700.0, 800.0], params), [0.0, 0.5, 1.0])
    assert float(denormalize(0.5, params)) == 700.0


def test_normalize_round_trip(rng):
    x = rng.uniform(600, 800, size=100)
    params = NormalizationParams.fit(x)
    np.testing.assert_allclose(denormalize(normalize(x, params), params), x, rtol=1e-12)


def test_normalize_outside_range_not_clipped():
    params = NormalizationParams(0.0, 10.0)
    np.testing.assert_allclose(normalize([-5.0, 15.0], params), [-0.5, 1.5])


def test_normalize_degenerate_range():
    with pytest.raises(DegenerateRangeError, match="degenerate range"):
        normalize(np.ones(5), NormalizationParams(3.0, 3.0))


def test_build_windows_counts():
    grid = np.arange(8 * 24, dtype=np.float64).reshape(8, 24)
    windows = build_windows(LoadMatrix(grid), 7)
    assert len(windows) == 1
    assert windows.inputs.shape == (1, 7, 24)
    np.testing.assert_array_equal(windows.inputs[0, 0], grid[0])
    np.testing.assert_array_equal(windows.targets[0], grid[7])

    big = build_windows(LoadMatrix(np.zeros((335, 24))), 7)
    assert len(big) == 328


def test_build_windows_too_few_days():
    with pytest.raises(InsufficientHistoryError, match="too few days"):
        build_windows(LoadMatrix(np.zeros((7, 24))), 7)


def test_hour_unroll_shape():
    windows = build_windows(LoadMatrix(np.arange(240, dtype=np.float64).reshape(10, 24)), 3)
    seq = windows.sequences("hour")
    assert seq.shape == (7, 72, 1)
    np.testing.assert_array_equal(seq[0, :, 0], np.arange(72))
    np.testing.assert_array_equal(as_sequences(windows.inputs, "day"), windows.inputs)


def test_split_validation_keeps_both_sides():
    windows = build_windows(LoadMatrix(np.zeros((12, 24))), 2)
    fit_part, val_part = windows.split_validation(0.1)
    assert len(fit_part) == 9 and len(val_part) == 1


def test_series_frame_timestamps(make_series):
    series = make_series(days=1)
    frame = series.to_frame()
    assert frame["timestamp"].iloc[1] == "2024-01-01T01:00:00"
    assert isinstance(series, LoadSeries)
