"""
시간별 부하 CSV 로드 및 일×24시간 행렬 변환
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from utils import get_logger
from utils.errors import DataError, ShapeMismatchError

logger = get_logger(__name__)

HOURS_PER_DAY = 24
HEADER_LINES = 1


class CsvSchema(BaseModel):
    """입력 CSV 컬럼 정의"""

    timestamp_column: str = Field("timestamp", description="ISO-8601 시각 컬럼")
    load_column: str = Field("load", description="부하 값 컬럼")
    unit: str = Field("kW", description="부하 단위 (메타데이터로만 전달)")


@dataclass
class LoadSeries:
    """시작 시각 + 시간 간격으로 정렬된 부하 값"""

    start_timestamp: pd.Timestamp
    values: np.ndarray
    unit: str = "kW"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.start_timestamp = pd.Timestamp(self.start_timestamp)
        if self.values.ndim != 1 or self.values.size < 1:
            raise DataError("load series must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(self.values)):
            raise DataError("load series contains non-finite values")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def days(self) -> int:
        return len(self) // HOURS_PER_DAY

    def timestamps(self) -> pd.DatetimeIndex:
        return pd.date_range(self.start_timestamp, periods=len(self), freq="h")

    def with_values(self, values: np.ndarray) -> "LoadSeries":
        return LoadSeries(self.start_timestamp, values, self.unit)

    def head_days(self, days: int) -> "LoadSeries":
        """앞쪽 days일만 잘라낸 시계열"""
        return self.with_values(self.values[: days * HOURS_PER_DAY])

    def day_values(self, day: int) -> np.ndarray:
        return self.values[day * HOURS_PER_DAY:(day + 1) * HOURS_PER_DAY].copy()

    def to_matrix(self) -> "LoadMatrix":
        return LoadMatrix.from_values(self.values)

    def to_frame(self, schema: Optional[CsvSchema] = None) -> pd.DataFrame:
        schema = schema or CsvSchema(unit=self.unit)
        return pd.DataFrame({
            schema.timestamp_column: self.timestamps().strftime("%Y-%m-%dT%H:%M:%S"),
            schema.load_column: self.values,
        })


@dataclass
class LoadMatrix:
    """일(행) × 시간(열 24개) 부하 행렬"""

    grid: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.float64)
        if self.grid.ndim != 2 or self.grid.shape[1] != HOURS_PER_DAY:
            raise ShapeMismatchError(f"load matrix must be days × 24, got {self.grid.shape}")
        if self.grid.shape[0] < 1:
            raise DataError("load matrix must contain at least one day")

    @classmethod
    def from_values(cls, values: np.ndarray) -> "LoadMatrix":
        values = np.asarray(values, dtype=np.float64)
        if values.size % HOURS_PER_DAY != 0:
            raise DataError(
                f"series length {values.size} is not divisible by {HOURS_PER_DAY}"
            )
        return cls(values.reshape(-1, HOURS_PER_DAY))

    @property
    def days(self) -> int:
        return int(self.grid.shape[0])

    def flatten(self) -> np.ndarray:
        return self.grid.reshape(-1).copy()


def _line_of(row_index: int) -> int:
    """DataFrame 행 번호 → 파일 줄 번호 (헤더 포함, 1부터)"""
    return int(row_index) + HEADER_LINES + 1


def load_csv(path: Path, schema: Optional[CsvSchema] = None) -> LoadSeries:
    """
    timestamp/load CSV를 읽어 LoadSeries로 반환

    타임스탬프 중복, 역순, 1시간이 아닌 간격은 줄 번호와 함께 거부한다(보간하지 않음).
    """
    schema = schema or CsvSchema()
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"입력 파일이 없습니다: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DataError(f"no data rows: {path}") from None

    missing = [c for c in (schema.timestamp_column, schema.load_column) if c not in frame.columns]
    if missing:
        raise DataError(f"missing columns {missing} in {path}")
    if frame.empty:
        raise DataError(f"no data rows: {path}")

    stamps = pd.to_datetime(frame[schema.timestamp_column].str.strip(), errors="coerce")
    loads = pd.to_numeric(frame[schema.load_column].str.strip(), errors="coerce")

    bad = stamps.isna() | loads.isna() | ~np.isfinite(loads.to_numpy(dtype=np.float64, na_value=np.nan))
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise DataError(
            f"unparseable row at line {_line_of(row)}: "
            f"{frame.iloc[row][schema.timestamp_column]!r}, {frame.iloc[row][schema.load_column]!r}"
        )

    duplicated = stamps.duplicated()
    if duplicated.any():
        row = int(np.flatnonzero(duplicated.to_numpy())[0])
        raise DataError(f"duplicated timestamp at line {_line_of(row)}: {stamps.iloc[row]}")

    deltas = stamps.diff().iloc[1:]
    backwards = deltas < pd.Timedelta(0)
    if backwards.any():
        row = int(np.flatnonzero(backwards.to_numpy())[0]) + 1
        raise DataError(f"non-monotone timestamp at line {_line_of(row)}: {stamps.iloc[row]}")

    gaps = deltas != pd.Timedelta(hours=1)
    if gaps.any():
        row = int(np.flatnonzero(gaps.to_numpy())[0]) + 1
        raise DataError(
            f"non-hourly gap at line {_line_of(row)}: "
            f"{stamps.iloc[row - 1]} → {stamps.iloc[row]}"
        )

    series = LoadSeries(stamps.iloc[0], loads.to_numpy(dtype=np.float64), schema.unit)
    logger.info(f"📥 {path} 로드 완료 — {len(series)}시간 ({len(series) / HOURS_PER_DAY:.1f}일)")
    return series


def split_target_day(series: LoadSeries, target_day: Optional[int] = None):
    """
    학습 이력과 평가 대상일로 분리

    Args:
        target_day: 1부터 시작하는 평가 대상일 번호 (None이면 마지막 날)

    Returns:
        (target_day 이전까지의 LoadSeries, 대상일 24개 실제값)
    """
    matrix = series.to_matrix()
    day = matrix.days if target_day is None else int(target_day)
    if not 2 <= day <= matrix.days:
        raise DataError(f"target day {day} outside 2..{matrix.days}")
    history = series.head_days(day - 1)
    return history, matrix.grid[day - 1].copy()
