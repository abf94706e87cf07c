"""
파이프라인 설정 스키마
"""
from __future__ import annotations

from enum import Enum
from typing import Any, Dict

from pydantic import BaseModel, Field

from decomposition.emd import MixScheme, SiftConfig
from network.params import CellType
from network.trainer import TrainConfig
from preprocessing.cleaning import CleaningConfig
from swarm.pso import SwarmConfig


class Variant(str, Enum):
    LSTM = "lstm"
    EMD_LSTM = "emd_lstm"
    PSO_LSTM = "pso_lstm"
    EMD_PSO_LSTM = "emd_pso_lstm"
    RNN = "rnn"
    GRU = "gru"

    @property
    def uses_emd(self) -> bool:
        return self in (Variant.EMD_LSTM, Variant.EMD_PSO_LSTM)

    @property
    def uses_pso(self) -> bool:
        return self in (Variant.PSO_LSTM, Variant.EMD_PSO_LSTM)

    @property
    def cell(self) -> CellType:
        if self == Variant.RNN:
            return CellType.RNN
        if self == Variant.GRU:
            return CellType.GRU
        return CellType.LSTM


# 비교 실험 기본 순서 (단순 RNN, GRU, LSTM, EMD-LSTM, PSO-LSTM, EMD-PSO-LSTM)
ALL_VARIANTS = [
    Variant.RNN,
    Variant.GRU,
    Variant.LSTM,
    Variant.EMD_LSTM,
    Variant.PSO_LSTM,
    Variant.EMD_PSO_LSTM,
]


class PipelineConfig(BaseModel):
    cleaning: CleaningConfig = Field(default_factory=CleaningConfig)
    sift: SiftConfig = Field(default_factory=SiftConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    swarm: SwarmConfig = Field(default_factory=SwarmConfig)
    variant: Variant = Field(Variant.EMD_PSO_LSTM, description="예측 방법")
    mix_index: int = Field(3, ge=1, description="MIXn의 n (고주파로 묶을 IMF 개수)")
    mix_scheme: MixScheme = Field(MixScheme.SEPARATE, description="MIXn 재조합 방식")
    window_days: int = Field(7, ge=1, description="N-to-one 입력 일수")
    seed: int = Field(42, description="마스터 시드")
    deterministic: bool = Field(True, description="True면 성분 학습을 순차 실행")
    workers: int = Field(1, ge=1, description="성분 병렬 학습 스레드 수")

    @property
    def uses_emd(self) -> bool:
        return self.variant.uses_emd

    @property
    def uses_pso(self) -> bool:
        return self.variant.uses_pso

    @property
    def effective_workers(self) -> int:
        return 1 if self.deterministic else self.workers

    def with_variant(self, variant: Variant) -> "PipelineConfig":
        return self.model_copy(update={"variant": Variant(variant)})

    def to_flat(self) -> Dict[str, Any]:
        """평문 설정 키(KEY=VALUE) 형태로 펼친 값 (매니페스트/설정 파일과 같은 키)"""
        from config import PIPELINE_KEYS

        flat: Dict[str, Any] = {}
        for key, (section, field) in PIPELINE_KEYS.items():
            owner = getattr(self, section) if section else self
            value = getattr(owner, field)
            if isinstance(value, Enum):
                value = value.value
            flat[key] = value
        return flat
