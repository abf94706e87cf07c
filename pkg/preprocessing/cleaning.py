"""
불량 데이터 정제

1) 전체 행렬의 평균 μ, 모표준편차 σ 계산
2) |X − μ| > 3·σ·ε 인 셀 검출
3) 검출된 셀을 같은 시간대 인접일(α), 같은 날 인접 시간(β), 전체 평균(γ)의 가중합으로 보정
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from utils import get_logger

from .load_data import LoadMatrix

logger = get_logger(__name__)

WEIGHT_TOLERANCE = 1e-12


class CleaningConfig(BaseModel):
    """3σ 검출 임계 배수 ε 와 보정 가중치 α, β, γ"""

    epsilon: float = Field(1.0, gt=0, description="3σ 임계값 배수 ε")
    alpha: float = Field(0.4, ge=0, description="같은 시간대 인접일 가중치 α")
    beta: float = Field(0.4, ge=0, description="같은 날 인접 시간 가중치 β")
    gamma: float = Field(0.2, ge=0, description="전체 평균 가중치 γ")

    @model_validator(mode="after")
    def _weights_sum_to_one(self):
        total = self.alpha + self.beta + self.gamma
        if abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValueError(f"alpha + beta + gamma must equal 1 (got {total!r})")
        return self


@dataclass
class CleaningStats:
    mean: float
    stddev: float
    flagged: List[Tuple[int, int]] = field(default_factory=list)


@dataclass
class CleaningReport:
    """정제 결과: 보정된 행렬, 통계, (day, hour, original, revised) 기록"""

    matrix: LoadMatrix
    stats: CleaningStats
    rows: List[Tuple[int, int, float, float]] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["day", "hour", "original", "revised"])


def detect_outliers(matrix: LoadMatrix, cfg: CleaningConfig) -> CleaningStats:
    """3σ 원칙(임계 배수 ε)으로 불량 셀 검출"""
    grid = matrix.grid
    mu = float(grid.mean())
    sigma = float(grid.std())  # 모표준편차 (n으로 나눔)
    if sigma == 0.0:
        return CleaningStats(mean=mu, stddev=0.0, flagged=[])

    mask = np.abs(grid - mu) > 3.0 * sigma * cfg.epsilon
    flagged = [(int(d), int(h)) for d, h in zip(*np.nonzero(mask))]
    return CleaningStats(mean=mu, stddev=sigma, flagged=flagged)


def _neighbor_pair(line: np.ndarray, index: int, fallback: float) -> float:
    """인접 두 값의 합. 경계에서는 존재하는 이웃 하나를 두 번 사용"""
    before = line[index - 1] if index - 1 >= 0 else None
    after = line[index + 1] if index + 1 < line.size else None
    if before is None and after is None:
        return 2.0 * fallback
    if before is None:
        return 2.0 * after
    if after is None:
        return 2.0 * before
    return before + after


def revise_point(
    matrix: LoadMatrix,
    day: int,
    hour: int,
    cfg: CleaningConfig,
    stats: CleaningStats,
) -> float:
    """(α/2)·Σ 같은 시간대 인접일 + (β/2)·Σ 같은 날 인접 시간 + γ·μ"""
    grid = matrix.grid
    if not (0 <= day < grid.shape[0] and 0 <= hour < grid.shape[1]):
        raise IndexError(f"cell ({day}, {hour}) outside matrix {grid.shape}")

    same_hour = _neighbor_pair(grid[:, hour], day, stats.mean)
    same_day = _neighbor_pair(grid[day, :], hour, stats.mean)
    return float(cfg.alpha / 2 * same_hour + cfg.beta / 2 * same_day + cfg.gamma * stats.mean)


def clean_matrix(matrix: LoadMatrix, cfg: CleaningConfig) -> CleaningReport:
    """
    한 번의 패스로 검출+보정

    이웃 값은 항상 원본 행렬에서 읽으므로 보정 순서와 무관하게 결과가 같다.
    """
    stats = detect_outliers(matrix, cfg)
    revised = matrix.grid.copy()
    rows: List[Tuple[int, int, float, float]] = []
    for day, hour in stats.flagged:
        value = revise_point(matrix, day, hour, cfg, stats)
        rows.append((day, hour, float(matrix.grid[day, hour]), value))
        revised[day, hour] = value

    if rows:
        logger.info(f"🧹 불량 데이터 {len(rows)}건 보정 (μ={stats.mean:.3f}, σ={stats.stddev:.3f})")
    else:
        logger.debug("불량 데이터 없음")
    return CleaningReport(matrix=LoadMatrix(revised), stats=stats, rows=rows)
