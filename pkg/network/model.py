"""
시퀀스 순전파(다층 셀 + 선형 출력 헤드), RMSE 손실, BPTT 역전파
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from utils.errors import ShapeMismatchError

from .cells import CELL_BACKWARD, CELL_FORWARD, LstmState
from .params import GradientSet, NetworkParams, layer_prefix


@dataclass
class ForwardCache:
    """역전파에 필요한 중간값. steps[layer][t]는 셀 캐시"""

    batched: bool
    steps: List[List[Dict[str, Any]]]
    last_h: np.ndarray
    prediction: np.ndarray


def _as_batch(seq: np.ndarray) -> Tuple[np.ndarray, bool]:
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim == 2:
        return seq[None, :, :], False
    if seq.ndim == 3:
        return seq, True
    raise ShapeMismatchError(f"sequence must be (N, in) or (B, N, in), got shape {seq.shape}")


def sequence_forward(seq: np.ndarray, params: NetworkParams) -> Tuple[np.ndarray, ForwardCache]:
    """
    0 초기 상태에서 N 스텝을 모두 진행한 뒤 마지막 은닉 상태에 선형 헤드 적용

    Args:
        seq: (N, in) 단일 시퀀스 또는 (B, N, in) 배치

    Returns:
        prediction: (out,) 또는 (B, out), caches
    """
    batch, batched = _as_batch(seq)
    b, n_steps, in_dim = batch.shape
    if n_steps < 1:
        raise ShapeMismatchError("sequence needs at least 1 step")
    if in_dim != params.input_dim:
        raise ShapeMismatchError(f"input dim {in_dim} != network input dim {params.input_dim}")

    forward = CELL_FORWARD[params.cell]
    layer_inputs = [batch[:, t, :] for t in range(n_steps)]
    steps: List[List[Dict[str, Any]]] = []
    for layer in range(params.num_layers):
        p = params.layer(layer)
        state = LstmState.zeros(b, params.hidden_dim, params.cell)
        caches: List[Dict[str, Any]] = []
        outputs: List[np.ndarray] = []
        for x in layer_inputs:
            state, cache = forward(x, state, p)
            caches.append(cache)
            outputs.append(state.h)
        steps.append(caches)
        layer_inputs = outputs

    last_h = layer_inputs[-1]
    prediction = last_h @ params["w_out"].T + params["bias_out"]
    cache = ForwardCache(batched=batched, steps=steps, last_h=last_h, prediction=prediction)
    return (prediction if batched else prediction[0]), cache


def predict(params: NetworkParams, seq: np.ndarray) -> np.ndarray:
    return sequence_forward(seq, params)[0]


def loss_rmse(pred: np.ndarray, target: np.ndarray) -> float:
    """
    sqrt(mean((pred − target)²))

    2차원 배치이면 샘플별 RMSE의 평균
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} and target {target.shape} differ")
    if pred.ndim == 1:
        return float(np.sqrt(np.mean((pred - target) ** 2)))
    return float(np.mean(np.sqrt(np.mean((pred - target) ** 2, axis=-1))))


def _rmse_output_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """배치 평균 RMSE의 예측값 기울기. 잔차가 0인 샘플은 기울기 0"""
    diff = pred - target
    per_sample = np.sqrt(np.mean(diff ** 2, axis=-1, keepdims=True))
    safe = np.where(per_sample > 0.0, per_sample, 1.0)
    grad = diff / (diff.shape[-1] * safe)
    grad = np.where(per_sample > 0.0, grad, 0.0)
    return grad / diff.shape[0]


def backward(
    seq: np.ndarray, target: np.ndarray, params: NetworkParams, caches: ForwardCache
) -> GradientSet:
    """시간/층 역방향 누적으로 RMSE 손실의 정확한 기울기 계산"""
    target = np.asarray(target, dtype=np.float64)
    if not caches.batched:
        target = target[None, :]
    pred = caches.prediction
    if target.shape != pred.shape:
        raise ShapeMismatchError(f"target {target.shape} does not match prediction {pred.shape}")
    if len(caches.steps) != params.num_layers:
        raise ShapeMismatchError("forward cache does not match network depth")

    grads = params.zeros_like()
    g = grads.tensors
    dy = _rmse_output_grad(pred, target)
    g["w_out"] += dy.T @ caches.last_h
    g["bias_out"] += dy.sum(axis=0)

    n_steps = len(caches.steps[0])
    # 위층에서 내려오는 스텝별 dh (최상위 층은 마지막 스텝만)
    upstream = [np.zeros_like(caches.last_h) for _ in range(n_steps)]
    upstream[-1] = dy @ params["w_out"]

    backward_step = CELL_BACKWARD[params.cell]
    for layer in reversed(range(params.num_layers)):
        p = params.layer(layer)
        prefix = layer_prefix(layer)
        layer_grads = {name: g[prefix + name] for name in p}
        dh_carry = np.zeros_like(caches.last_h)
        dc_carry = np.zeros_like(caches.last_h)
        below: List[np.ndarray] = [None] * n_steps  # type: ignore[list-item]
        for t in reversed(range(n_steps)):
            dx, dh_carry, dc_prev = backward_step(
                upstream[t] + dh_carry, dc_carry, caches.steps[layer][t], p, layer_grads
            )
            if dc_prev is not None:
                dc_carry = dc_prev
            below[t] = dx
        upstream = below
    return grads


def loss_and_grad(
    seq: np.ndarray, target: np.ndarray, params: NetworkParams
) -> Tuple[float, GradientSet]:
    pred, caches = sequence_forward(seq, params)
    return loss_rmse(pred, target), backward(seq, target, params, caches)
