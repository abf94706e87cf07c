"""
극값 탐색, 영점 교차 계수, 3차 스플라인 포락선
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from utils.errors import DataError, InsufficientExtremaError


class BoundaryPolicy(str, Enum):
    """스플라인 끝단 처리 방식"""

    MIRROR = "mirror"  # 양 끝에서 가장 가까운 극값 2개를 끝점 기준으로 대칭 복사
    CLAMP = "clamp"    # 가장 가까운 극값의 값을 끝점 위치에 매듭으로 추가
    NONE = "none"      # 확장 없음 (매듭 바깥은 스플라인 외삽)


@dataclass
class ExtremaSet:
    max_idx: np.ndarray
    max_val: np.ndarray
    min_idx: np.ndarray
    min_val: np.ndarray

    @property
    def maxima(self) -> List[Tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.max_idx, self.max_val)]

    @property
    def minima(self) -> List[Tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.min_idx, self.min_val)]

    @property
    def count(self) -> int:
        return int(self.max_idx.size + self.min_idx.size)


def find_extrema(series: np.ndarray) -> ExtremaSet:
    """
    내부 극대/극소 탐색

    같은 값이 이어지는 평탄 구간은 하나의 점으로 묶고, 극값이면 구간 중앙 인덱스를 보고한다.
    양 끝에 닿은 구간은 내부 극값이 아니다.
    """
    s = np.asarray(series, dtype=np.float64)
    if s.ndim != 1 or s.size < 3:
        raise DataError("series too short for extrema search (need ≥ 3 points)")

    change = np.flatnonzero(np.diff(s) != 0) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change - 1, [s.size - 1]))
    runs = s[starts]

    empty_i = np.empty(0, dtype=np.int64)
    empty_v = np.empty(0, dtype=np.float64)
    if runs.size < 3:
        return ExtremaSet(empty_i, empty_v, empty_i.copy(), empty_v.copy())

    rise = runs[1:-1] - runs[:-2]
    fall = runs[1:-1] - runs[2:]
    mid = (starts[1:-1] + ends[1:-1]) // 2

    is_max = (rise > 0) & (fall > 0)
    is_min = (rise < 0) & (fall < 0)
    max_idx = mid[is_max].astype(np.int64)
    min_idx = mid[is_min].astype(np.int64)
    return ExtremaSet(max_idx, s[max_idx], min_idx, s[min_idx])


def count_zero_crossings(series: np.ndarray) -> int:
    """부호 변화 횟수 (정확히 0인 표본은 건너뜀)"""
    s = np.asarray(series, dtype=np.float64)
    nonzero = s[s != 0]
    if nonzero.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(np.sign(nonzero)) != 0))


def imf_condition_holds(series: np.ndarray) -> bool:
    """IMF 조건 1: |극값 수 − 영점 교차 수| ≤ 1"""
    return abs(find_extrema(series).count - count_zero_crossings(series)) <= 1


def _extend_knots(
    positions: np.ndarray, values: np.ndarray, length: int, policy: BoundaryPolicy
) -> Tuple[np.ndarray, np.ndarray]:
    if positions.size == 0 or policy == BoundaryPolicy.NONE:
        return positions, values

    last = float(length - 1)
    if policy == BoundaryPolicy.MIRROR:
        left_pos = -positions[:2][::-1]
        left_val = values[:2][::-1]
        right_pos = 2.0 * last - positions[-2:][::-1]
        right_val = values[-2:][::-1]
        positions = np.concatenate((left_pos, positions, right_pos))
        values = np.concatenate((left_val, values, right_val))
    else:
        if positions[0] > 0:
            positions = np.concatenate(([0.0], positions))
            values = np.concatenate(([values[0]], values))
        if positions[-1] < last:
            positions = np.concatenate((positions, [last]))
            values = np.concatenate((values, [values[-1]]))

    # 끝점 위의 매듭을 대칭 복사하면 같은 위치가 두 번 생기므로 하나만 유지
    positions, keep = np.unique(positions, return_index=True)
    return positions, values[keep]


def spline_envelope(
    positions: Sequence[float],
    values: Sequence[float],
    length: int,
    policy: BoundaryPolicy = BoundaryPolicy.MIRROR,
) -> np.ndarray:
    """
    극값 매듭을 지나는 자연 3차 스플라인을 0..length−1 정수 위치에서 평가

    Raises:
        InsufficientExtremaError: 끝단 확장 후에도 매듭이 2개 미만
    """
    pos = np.asarray(positions, dtype=np.float64)
    val = np.asarray(values, dtype=np.float64)
    if pos.shape != val.shape:
        raise DataError("knot positions and values must have the same length")

    order = np.argsort(pos, kind="stable")
    pos, val = _extend_knots(pos[order], val[order], length, BoundaryPolicy(policy))
    if pos.size < 2:
        raise InsufficientExtremaError(
            f"insufficient extrema: {pos.size} knot(s) after boundary extension"
        )

    spline = CubicSpline(pos, val, bc_type="natural")
    return spline(np.arange(length, dtype=np.float64))
