"""
비교/스윕 실험

각 설정은 같은 마스터 시드로 fit + forecast_day + MAPE 평가를 수행한다.
한 설정이 실패해도 경고만 남기고 나머지 설정은 계속 실행한다.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from preprocessing.load_data import LoadSeries
from utils import get_logger

from .metrics import evaluate_mape, metrics_report, persistence_forecast
from .schemas import PipelineConfig, Variant
from .service import fit_and_forecast

logger = get_logger(__name__)

PERSISTENCE = "persistence"


@dataclass
class SettingRun:
    name: str
    forecast: Optional[np.ndarray] = None
    mape_per_hour: Optional[np.ndarray] = None
    report: dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ExperimentTable:
    """시간별 표(실제값, 설정별 예측·MAPE, 마지막 행 평균)와 요약 표"""

    actual: np.ndarray
    runs: List[SettingRun]

    def hourly_frame(self) -> pd.DataFrame:
        hours = self.actual.size
        frame = pd.DataFrame({"hour": [str(h) for h in range(1, hours + 1)], "actual": self.actual})
        for run in self.runs:
            frame[f"{run.name}_forecast"] = run.forecast if run.ok else np.nan
            frame[f"{run.name}_mape"] = run.mape_per_hour if run.ok else np.nan
        mean_row = {"hour": "mean", "actual": float(np.mean(self.actual))}
        for run in self.runs:
            mean_row[f"{run.name}_forecast"] = float(np.mean(run.forecast)) if run.ok else np.nan
            mean_row[f"{run.name}_mape"] = run.report.get("mape_mean", np.nan)
        return pd.concat([frame, pd.DataFrame([mean_row])], ignore_index=True)

    def summary_frame(self) -> pd.DataFrame:
        columns = ["setting", "mape_mean", "accuracy", "rmse", "min_error", "max_error", "error"]
        rows = []
        for run in self.runs:
            row = {"setting": run.name, "error": run.error or ""}
            for key in columns[1:-1]:
                row[key] = run.report.get(key, np.nan)
            rows.append(row)
        return pd.DataFrame(rows, columns=columns)

    def mean_mape(self, name: str) -> float:
        for run in self.runs:
            if run.name == name:
                return run.report.get("mape_mean", float("nan"))
        raise KeyError(name)


def _updated(cfg: PipelineConfig, **changes) -> PipelineConfig:
    return PipelineConfig.model_validate({**cfg.model_dump(), **changes})


def _run_setting(name: str, history: LoadSeries, actual: np.ndarray, cfg: PipelineConfig) -> SettingRun:
    try:
        _, result = fit_and_forecast(history, cfg, actual)
        report = metrics_report(result.aggregate, actual)
        logger.info(f"📊 {name}: 평균 MAPE {report['mape_mean']:.2f}%")
        return SettingRun(name, result.aggregate, result.mape_per_hour, report)
    except Exception as e:
        logger.warning(f"⚠️ {name} 실패 — {type(e).__name__}: {e}")
        return SettingRun(name, error=f"{type(e).__name__}: {e}")


def _persistence_run(history: LoadSeries, actual: np.ndarray) -> SettingRun:
    try:
        forecast = persistence_forecast(history)
        report = metrics_report(forecast, actual)
        return SettingRun(PERSISTENCE, forecast, evaluate_mape(forecast, actual)[0], report)
    except Exception as e:
        logger.warning(f"⚠️ {PERSISTENCE} 실패 — {e}")
        return SettingRun(PERSISTENCE, error=f"{type(e).__name__}: {e}")


def run_settings(
    history: LoadSeries,
    actual,
    settings: Sequence[Tuple[str, PipelineConfig]],
    include_persistence: bool = False,
) -> ExperimentTable:
    actual = np.asarray(actual, dtype=np.float64)
    runs = [_run_setting(name, history, actual, cfg) for name, cfg in settings]
    if include_persistence:
        runs.append(_persistence_run(history, actual))
    return ExperimentTable(actual=actual, runs=runs)


def compare_methods(
    history: LoadSeries,
    actual,
    variants: Sequence[Variant],
    base_cfg: PipelineConfig,
    include_persistence: bool = False,
) -> ExperimentTable:
    """변형별 예측 비교 (모두 base_cfg의 마스터 시드 공유)"""
    settings = [(Variant(v).value, base_cfg.with_variant(v)) for v in variants]
    return run_settings(history, actual, settings, include_persistence)


def sweep_input_pattern(
    history: LoadSeries, actual, ns: Sequence[int], cfg: PipelineConfig
) -> ExperimentTable:
    """N-to-one 입력 일수 스윕 (행 이름 "N-1")"""
    settings = [(f"{n}-1", _updated(cfg, window_days=int(n))) for n in ns]
    return run_settings(history, actual, settings)


def sweep_mix(history: LoadSeries, actual, ns: Sequence[int], cfg: PipelineConfig) -> ExperimentTable:
    """MIXn 스윕 (EMD 변형 필요)"""
    if not cfg.uses_emd:
        raise ValueError(f"mix sweep requires an EMD variant, got {cfg.variant.value}")
    settings = [(f"MIX{n}", _updated(cfg, mix_index=int(n))) for n in ns]
    return run_settings(history, actual, settings)
