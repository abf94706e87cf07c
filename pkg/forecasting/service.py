"""
예측 서비스: 정제 → (EMD → MIXn 재조합) → 성분별 정규화/학습 → 예측 → 역정규화 → 합산
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from decomposition.emd import ImfSet, decompose, recombine
from network.model import predict
from network.params import NetworkParams, init_params
from network.trainer import TrainConfig, train
from preprocessing.cleaning import CleaningReport, clean_matrix
from preprocessing.load_data import HOURS_PER_DAY, LoadMatrix, LoadSeries
from preprocessing.windows import (
    NormalizationParams,
    as_sequences,
    build_windows,
    denormalize,
    input_dim_for,
    normalize,
)
from swarm.fitness import FitnessSpec
from swarm.pso import optimize
from utils import get_logger, log_execution_time
from utils.errors import ComponentError, DataError, InsufficientHistoryError, ShapeMismatchError

from .metrics import evaluate_mape
from .schemas import PipelineConfig
from .seeding import STREAM_INIT, STREAM_SWARM, STREAM_TRAIN, derive_seed

logger = get_logger(__name__)


@dataclass
class ComponentModel:
    component_id: int
    label: str
    norm: NormalizationParams
    params: NetworkParams
    loss_history: List[float] = field(default_factory=list)
    swarm_fitness: Optional[float] = None
    swarm_trace: List[Dict[str, float]] = field(default_factory=list, repr=False)

    def to_metadata(self) -> Dict[str, Any]:
        return {
            "component_id": self.component_id,
            "label": self.label,
            "x_min": self.norm.x_min,
            "x_max": self.norm.x_max,
            "cell": self.params.cell.value,
            **self.params.dims(),
            "loss_history": list(self.loss_history),
            "swarm_fitness": self.swarm_fitness,
        }


@dataclass
class ForecastResult:
    """
    per_component: (K, 24) 역정규화된 성분별 예측
    aggregate: 성분 합
    """

    per_component: np.ndarray
    labels: List[str]
    aggregate: np.ndarray
    actual: Optional[np.ndarray] = None
    mape_per_hour: Optional[np.ndarray] = None
    mape_mean: Optional[float] = None

    def with_actual(self, actual) -> "ForecastResult":
        actual = np.asarray(actual, dtype=np.float64)
        per_hour, mean = evaluate_mape(self.aggregate, actual)
        return ForecastResult(self.per_component, self.labels, self.aggregate, actual, per_hour, mean)

    def to_frame(self) -> pd.DataFrame:
        """hour, component_1..component_K, aggregate[, actual, mape]"""
        frame = pd.DataFrame({"hour": np.arange(1, self.aggregate.size + 1)})
        for k, values in enumerate(self.per_component, start=1):
            frame[f"component_{k}"] = values
        frame["aggregate"] = self.aggregate
        if self.actual is not None:
            frame["actual"] = self.actual
            frame["mape"] = self.mape_per_hour
        return frame


@dataclass
class PreparedSeries:
    cleaning: CleaningReport
    cleaned: np.ndarray
    parts: np.ndarray
    labels: List[str]
    imf_set: Optional[ImfSet] = None


def prepare_components(history: LoadSeries, cfg: PipelineConfig) -> PreparedSeries:
    """정제 후 모델링 대상 성분 구성 (EMD 미사용 변형은 전체 부하 하나)"""
    if len(history) % HOURS_PER_DAY != 0:
        raise DataError(f"history length {len(history)} is not divisible by {HOURS_PER_DAY}")
    report = clean_matrix(history.to_matrix(), cfg.cleaning)
    cleaned = report.matrix.flatten()
    if not cfg.uses_emd:
        return PreparedSeries(report, cleaned, cleaned[None, :], ["load"])
    imf_set = decompose(cleaned, cfg.sift)
    parts = recombine(imf_set, cfg.mix_index, cfg.mix_scheme)
    return PreparedSeries(report, cleaned, parts.parts, parts.labels, imf_set)


def _train_config(cfg: PipelineConfig, component_id: int) -> TrainConfig:
    return cfg.train.model_copy(
        update={
            "cell": cfg.variant.cell,
            "seed": derive_seed(cfg.seed, component_id, STREAM_TRAIN),
        }
    )


def _fit_component(component_id: int, label: str, values: np.ndarray, cfg: PipelineConfig) -> ComponentModel:
    stage = "normalize"
    try:
        norm = NormalizationParams.fit(values)
        scaled = normalize(values, norm)

        stage = "windows"
        windows = build_windows(LoadMatrix.from_values(scaled), cfg.window_days)

        stage = "init"
        train_cfg = _train_config(cfg, component_id)
        init = init_params(
            train_cfg.cell,
            input_dim_for(train_cfg.unroll),
            train_cfg.hidden_dim,
            HOURS_PER_DAY,
            train_cfg.num_layers,
            seed=derive_seed(cfg.seed, component_id, STREAM_INIT),
        )

        swarm_fitness = None
        trace: List[Dict[str, float]] = []
        if cfg.uses_pso:
            stage = "pso"
            swarm_cfg = cfg.swarm.model_copy(update={"seed": derive_seed(cfg.seed, component_id, STREAM_SWARM)})
            spec = FitnessSpec.build(windows, init, train_cfg, swarm_cfg)
            result = optimize(spec, spec.dim, swarm_cfg, workers=cfg.effective_workers, x0=spec.initial_position())
            init = spec.params_for(result.best_position)
            swarm_fitness, trace = result.best_fitness, result.trace

        stage = "train"
        params, history = train(windows, train_cfg, init)
    except Exception as e:
        raise ComponentError(component_id, stage, e) from e

    final = f"{history[-1]:.6f}" if history else "-"
    logger.info(f"✅ 성분 {component_id} ({label}) 학습 완료 — 윈도우 {len(windows)}개, 최종 손실 {final}")
    return ComponentModel(component_id, label, norm, params, history, swarm_fitness, trace)


def _check_training_history(history: LoadSeries, cfg: PipelineConfig) -> None:
    needed = cfg.window_days + 2
    if len(history) % HOURS_PER_DAY == 0 and history.days < needed:
        raise InsufficientHistoryError(f"too few days: {history.days} days, need ≥ {needed}")


@log_execution_time()
def fit(
    history: LoadSeries, cfg: PipelineConfig, prepared: Optional[PreparedSeries] = None
) -> List[ComponentModel]:
    """
    성분별 모델 학습

    성분 k의 초기화/셔플/PSO 시드는 (마스터 시드, k)에서 유도되므로 실행 순서와 무관하다.
    prepared가 주어지면 같은 history로 만든 정제·분해 결과로 간주하고 재사용한다.
    """
    _check_training_history(history, cfg)
    if prepared is None:
        prepared = prepare_components(history, cfg)
    logger.info(
        f"🚀 [{cfg.variant.value}] 학습 시작 — 성분 {len(prepared.labels)}개, "
        f"정제 {len(prepared.cleaning.rows)}건, N={cfg.window_days}"
    )

    jobs = list(enumerate(zip(prepared.labels, prepared.parts)))
    workers = min(cfg.effective_workers, len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futures = [ex.submit(_fit_component, k, label, part, cfg) for k, (label, part) in jobs]
            return [f.result() for f in futures]
    return [_fit_component(k, label, part, cfg) for k, (label, part) in jobs]


def forecast_day(
    models: List[ComponentModel],
    history: LoadSeries,
    cfg: PipelineConfig,
    prepared: Optional[PreparedSeries] = None,
) -> ForecastResult:
    """
    이력 다음 날 24시간 예측

    성분별 마지막 N일을 학습 때의 정규화 파라미터로 변환(클리핑 없음)해 예측한 뒤 역정규화해 합산한다.
    """
    if not models:
        raise DataError("no component models supplied")
    if len(history) % HOURS_PER_DAY == 0 and history.days < cfg.window_days:
        raise InsufficientHistoryError(
            f"too few days: forecasting needs {cfg.window_days} days, history has {history.days}"
        )
    if prepared is None:
        prepared = prepare_components(history, cfg)
    if len(prepared.labels) != len(models):
        raise ShapeMismatchError(
            f"history yields {len(prepared.labels)} components but {len(models)} models were supplied"
        )

    unroll = cfg.train.unroll
    outputs = []
    for model, part in zip(sorted(models, key=lambda m: m.component_id), prepared.parts):
        try:
            recent = part[-cfg.window_days * HOURS_PER_DAY:].reshape(cfg.window_days, HOURS_PER_DAY)
            seq = as_sequences(normalize(recent, model.norm), unroll)
            outputs.append(denormalize(predict(model.params, seq), model.norm))
        except Exception as e:
            raise ComponentError(model.component_id, "forecast", e) from e

    per_component = np.vstack(outputs)
    return ForecastResult(
        per_component=per_component,
        labels=prepared.labels,
        aggregate=per_component.sum(axis=0),
    )


def fit_and_forecast(
    history: LoadSeries, cfg: PipelineConfig, actual: Optional[np.ndarray] = None
) -> Tuple[List[ComponentModel], ForecastResult]:
    _check_training_history(history, cfg)
    prepared = prepare_components(history, cfg)
    models = fit(history, cfg, prepared)
    result = forecast_day(models, history, cfg, prepared)
    if actual is not None:
        result = result.with_actual(actual)
    return models, result
