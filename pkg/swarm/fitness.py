"""
신경망 파라미터용 PSO 적합도

입자 위치 = 층 0 입력측 행렬 + 출력 헤드(w_out, bias_out)를 평탄화한 벡터.
은닉측 행렬과 게이트 편향은 템플릿(시드 초기화) 값을 유지한다.
적합도 = fitness_epochs 만큼 Adam 학습 후 검증 윈도우 RMSE.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from network.model import loss_rmse, predict
from network.params import HEAD_TENSORS, NetworkParams, input_side_names
from network.trainer import TrainConfig, train
from preprocessing.windows import WindowSet
from utils.errors import ShapeMismatchError

from .pso import SwarmConfig


def swarm_target_names(params: NetworkParams) -> List[str]:
    return input_side_names(params.cell) + list(HEAD_TENSORS)


@dataclass
class FitnessSpec:
    train_windows: WindowSet
    validation_windows: WindowSet
    template: NetworkParams
    base_config: TrainConfig
    fitness_epochs: int
    target_names: List[str]

    def __post_init__(self):
        if self.fitness_epochs < 0:
            raise ValueError("fitness_epochs must be ≥ 0")
        unknown = [n for n in self.target_names if n not in self.template.tensors]
        if unknown:
            raise ShapeMismatchError(f"unknown target tensors: {unknown}")

    @classmethod
    def build(
        cls,
        windows: WindowSet,
        template: NetworkParams,
        base_config: TrainConfig,
        swarm_cfg: SwarmConfig,
    ) -> "FitnessSpec":
        """학습 윈도우 뒤쪽 validation_fraction 비율을 검증용으로 떼어 둔다"""
        fit_part, val_part = windows.split_validation(swarm_cfg.validation_fraction)
        return cls(
            train_windows=fit_part,
            validation_windows=val_part,
            template=template,
            base_config=base_config,
            fitness_epochs=swarm_cfg.fitness_epochs,
            target_names=swarm_target_names(template),
        )

    @property
    def dim(self) -> int:
        return self.template.flat_size(self.target_names)

    def initial_position(self) -> np.ndarray:
        return self.template.flatten(self.target_names)

    def params_for(self, position: np.ndarray) -> NetworkParams:
        return self.template.with_flat(position, self.target_names)

    def __call__(self, position: np.ndarray) -> float:
        params = self.params_for(position)
        if self.fitness_epochs > 0:
            fitness_cfg = self.base_config.model_copy(update={"epochs": self.fitness_epochs})
            params, _ = train(self.train_windows, fitness_cfg, params)
        unroll = self.base_config.unroll
        pred = predict(params, self.validation_windows.sequences(unroll))
        return loss_rmse(pred, self.validation_windows.targets)
