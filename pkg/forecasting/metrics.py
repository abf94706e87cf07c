"""
예측 평가 지표와 지속성(persistence) 기준 예측
"""
from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from preprocessing.load_data import HOURS_PER_DAY, LoadSeries
from utils.errors import InsufficientHistoryError, ShapeMismatchError, ZeroActualError


def _pair(pred, actual) -> Tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    if pred.shape != actual.shape or pred.ndim != 1 or pred.size == 0:
        raise ShapeMismatchError(f"prediction {pred.shape} and actual {actual.shape} must be equal-length vectors")
    return pred, actual


def evaluate_mape(pred, actual) -> Tuple[np.ndarray, float]:
    """
    시간별 100·|actual − pred| / actual 과 그 평균

    Raises:
        ZeroActualError: 실제값에 0이 있으면 (건너뛰지 않고 오류)
    """
    pred, actual = _pair(pred, actual)
    zero = np.flatnonzero(actual == 0)
    if zero.size:
        raise ZeroActualError(f"zero actual value at hour {int(zero[0]) + 1}; MAPE undefined")
    per_hour = 100.0 * np.abs(actual - pred) / np.abs(actual)
    return per_hour, float(per_hour.mean())


def rmse(pred, actual) -> float:
    pred, actual = _pair(pred, actual)
    return float(np.sqrt(np.mean((actual - pred) ** 2)))


def accuracy(mape_mean: float) -> float:
    """예측 정확도(%) = 100 − 평균 MAPE"""
    return 100.0 - mape_mean


def persistence_forecast(history: LoadSeries, lag_days: int = 7) -> np.ndarray:
    """대상일(이력 다음 날)의 lag_days일 전 같은 시각 값"""
    days = history.days
    if days < lag_days:
        raise InsufficientHistoryError(f"too few days: persistence needs {lag_days}, history has {days}")
    start = (days - lag_days) * HOURS_PER_DAY
    return history.values[start:start + HOURS_PER_DAY].copy()


def metrics_report(pred, actual) -> Dict[str, float]:
    per_hour, mean = evaluate_mape(pred, actual)
    return {
        "hours": int(per_hour.size),
        "mape_mean": mean,
        "accuracy": accuracy(mean),
        "rmse": rmse(pred, actual),
        "min_error": float(per_hour.min()),
        "max_error": float(per_hour.max()),
    }


def format_report(report: Dict[str, float]) -> str:
    """평문 key=value 보고서"""
    return "".join(f"{key}={value!r}\n" if isinstance(value, float) else f"{key}={value}\n"
                   for key, value in report.items())
