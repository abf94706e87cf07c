"""
미니배치 Adam 학습 루프
"""
from __future__ import annotations

from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from preprocessing.windows import WindowSet
from utils import get_logger
from utils.errors import DataError, ShapeMismatchError

from .adam import AdamState, adam_step, clip_gradients
from .model import loss_and_grad
from .params import CellType, NetworkParams

logger = get_logger(__name__)


class TrainConfig(BaseModel):
    cell: CellType = Field(CellType.LSTM, description="순환 셀 종류")
    hidden_dim: int = Field(10, ge=1, description="은닉 뉴런 수")
    num_layers: int = Field(1, ge=1, description="순환층 수")
    learning_rate: float = Field(0.005, gt=0, description="Adam 스텝 크기 α")
    batch_size: int = Field(64, ge=1, description="미니배치 크기")
    epochs: int = Field(200, ge=0, description="에폭 수 (0이면 학습 없음)")
    seed: int = Field(0, description="셔플 RNG 시드")
    unroll: Literal["day", "hour"] = Field("day", description="day: N스텝×24, hour: N·24스텝×1")
    clip_norm: Optional[float] = Field(None, gt=0, description="전역 기울기 노름 상한 (None이면 끔)")
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    adam_epsilon: float = Field(1e-8, gt=0)


def train(
    windows: WindowSet, cfg: TrainConfig, init: NetworkParams
) -> Tuple[NetworkParams, List[float]]:
    """
    에폭마다 시드 고정 RNG로 셔플한 미니배치 Adam 학습

    Returns:
        (최종 파라미터, 에폭별 평균 손실)
    """
    if len(windows) == 0:
        raise DataError("empty window set")
    seqs = windows.sequences(cfg.unroll)
    targets = windows.targets
    if seqs.shape[-1] != init.input_dim:
        raise ShapeMismatchError(
            f"window input dim {seqs.shape[-1]} != network input dim {init.input_dim} (unroll={cfg.unroll})"
        )
    if targets.shape[-1] != init.output_dim:
        raise ShapeMismatchError(f"target dim {targets.shape[-1]} != network output dim {init.output_dim}")

    params = init.copy()
    history: List[float] = []
    if cfg.epochs == 0:
        return params, history

    rng = np.random.default_rng(cfg.seed)
    state = AdamState.create(
        params, alpha=cfg.learning_rate, beta1=cfg.beta1, beta2=cfg.beta2, epsilon=cfg.adam_epsilon
    )
    count = len(windows)
    for epoch in range(cfg.epochs):
        order = rng.permutation(count)
        total = 0.0
        for start in range(0, count, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            loss, grads = loss_and_grad(seqs[idx], targets[idx], params)
            params, state = adam_step(params, clip_gradients(grads, cfg.clip_norm), state)
            total += loss * idx.size
        history.append(total / count)
        if (epoch + 1) % 50 == 0:
            logger.debug(f"   epoch {epoch + 1}/{cfg.epochs} loss={history[-1]:.6f}")

    if state.skipped:
        logger.warning(f"⚠️ 학습 중 Adam 스텝 {state.skipped}회 건너뜀")
    return params, history
