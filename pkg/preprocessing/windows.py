"""
성분별 min-max 정규화와 N-to-one 학습 윈도우 구성
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.errors import DataError, DegenerateRangeError, InsufficientHistoryError

from .load_data import HOURS_PER_DAY, LoadMatrix


@dataclass(frozen=True)
class NormalizationParams:
    x_min: float
    x_max: float

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise DataError("normalization bounds must be finite")
        if self.x_max < self.x_min:
            raise DataError(f"x_max ({self.x_max}) < x_min ({self.x_min})")

    @classmethod
    def fit(cls, series: np.ndarray) -> "NormalizationParams":
        series = np.asarray(series, dtype=np.float64)
        return cls(float(series.min()), float(series.max()))

    @property
    def span(self) -> float:
        return self.x_max - self.x_min


def normalize(series: np.ndarray, params: NormalizationParams) -> np.ndarray:
    """(x − x_min) / (x_max − x_min). 범위 밖 값은 [0,1] 밖으로 그대로 매핑"""
    if not params.x_max > params.x_min:
        raise DegenerateRangeError(
            f"degenerate range: x_max == x_min == {params.x_min} (constant component)"
        )
    return (np.asarray(series, dtype=np.float64) - params.x_min) / params.span


def denormalize(value, params: NormalizationParams):
    """value·(x_max − x_min) + x_min"""
    return np.asarray(value, dtype=np.float64) * params.span + params.x_min


@dataclass
class WindowSet:
    """
    inputs: (samples, N, 24) 앞선 N일
    targets: (samples, 24) 다음 날
    """

    n_days: int
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.inputs.shape[0] != self.targets.shape[0]:
            raise DataError("inputs and targets must have equal count")

    def __len__(self) -> int:
        return int(self.targets.shape[0])

    def subset(self, index) -> "WindowSet":
        return WindowSet(self.n_days, self.inputs[index], self.targets[index])

    def split_validation(self, fraction: float) -> Tuple["WindowSet", "WindowSet"]:
        """뒤쪽 fraction 비율을 검증용으로 분리 (최소 1개, 학습용도 최소 1개)"""
        count = len(self)
        if count < 2:
            raise InsufficientHistoryError("need at least 2 windows to hold out a validation slice")
        n_val = min(count - 1, max(1, int(round(count * fraction))))
        return self.subset(slice(0, count - n_val)), self.subset(slice(count - n_val, count))

    def sequences(self, unroll: str = "day") -> np.ndarray:
        """
        신경망 입력 시퀀스
        day: N 스텝 × 24차원, hour: N·24 스텝 × 1차원
        """
        return as_sequences(self.inputs, unroll)


def as_sequences(inputs: np.ndarray, unroll: str = "day") -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    if unroll == "day":
        return inputs
    if unroll == "hour":
        return inputs.reshape(*inputs.shape[:-2], inputs.shape[-2] * inputs.shape[-1], 1)
    raise ValueError(f"unknown unroll mode: {unroll}")


def input_dim_for(unroll: str) -> int:
    return HOURS_PER_DAY if unroll == "day" else 1


def build_windows(matrix: LoadMatrix, n_days: int) -> WindowSet:
    """앞선 N일 → 다음 날 24시간 (days − N 개 샘플)"""
    if n_days < 1:
        raise DataError("window length must be ≥ 1 day")
    grid = matrix.grid
    days = grid.shape[0]
    if days <= n_days:
        raise InsufficientHistoryError(f"too few days: {days} days for a {n_days}-day window")

    count = days - n_days
    # sliding_window_view 결과는 읽기 전용 뷰이므로 복사해서 보관
    views = np.lib.stride_tricks.sliding_window_view(grid, (n_days, HOURS_PER_DAY))[:, 0]
    inputs = np.ascontiguousarray(views[:count])
    targets = grid[n_days:].copy()
    return WindowSet(n_days=n_days, inputs=inputs, targets=targets)
