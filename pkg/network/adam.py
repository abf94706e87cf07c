"""
Adam 옵티마이저 (편향 보정 1·2차 모멘트)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from utils import get_logger
from utils.errors import ShapeMismatchError

from .params import NetworkParams

logger = get_logger(__name__)

Tensors = Dict[str, np.ndarray]


@dataclass
class AdamState:
    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: Tensors = field(default_factory=dict)
    v: Tensors = field(default_factory=dict)
    skipped: int = 0  # 비유한 기울기로 건너뛴 스텝 수

    def __post_init__(self):
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"beta1/beta2 must be in [0, 1): {self.beta1}, {self.beta2}")
        if self.alpha <= 0 or self.epsilon <= 0:
            raise ValueError("alpha and epsilon must be > 0")

    @classmethod
    def create(
        cls,
        params: Union[NetworkParams, Mapping[str, np.ndarray]],
        alpha: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ) -> "AdamState":
        tensors = params.tensors if isinstance(params, NetworkParams) else params
        return cls(
            alpha=alpha,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
            m={n: np.zeros_like(t, dtype=np.float64) for n, t in tensors.items()},
            v={n: np.zeros_like(t, dtype=np.float64) for n, t in tensors.items()},
        )


def adam_update(theta: Mapping[str, np.ndarray], grads: Mapping[str, np.ndarray], state: AdamState) -> Tensors:
    """
    텐서 사전 단위 Adam 한 스텝. state는 제자리 갱신된다.

    기울기에 NaN/inf가 있으면 경고 후 스텝을 건너뛰고 theta를 그대로 반환
    """
    if set(theta) != set(grads):
        raise ShapeMismatchError("parameter and gradient names differ")
    for name, g in grads.items():
        if np.shape(g) != np.shape(theta[name]):
            raise ShapeMismatchError(f"{name}: gradient shape {np.shape(g)} != {np.shape(theta[name])}")

    if not all(np.all(np.isfinite(g)) for g in grads.values()):
        state.skipped += 1
        logger.warning(f"⚠️ 비유한 기울기 → Adam 스텝 건너뜀 (t={state.t}, 누적 {state.skipped}회)")
        return dict(theta)

    if not state.m:
        state.m = {n: np.zeros_like(t, dtype=np.float64) for n, t in theta.items()}
        state.v = {n: np.zeros_like(t, dtype=np.float64) for n, t in theta.items()}

    state.t += 1
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** state.t
    correction2 = 1.0 - b2 ** state.t
    updated: Tensors = {}
    for name, value in theta.items():
        g = np.asarray(grads[name], dtype=np.float64)
        state.m[name] = b1 * state.m[name] + (1.0 - b1) * g
        state.v[name] = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = state.m[name] / correction1
        v_hat = state.v[name] / correction2
        updated[name] = value - state.alpha * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return updated


def adam_step(
    params: NetworkParams, grads: NetworkParams, state: AdamState
) -> Tuple[NetworkParams, AdamState]:
    """θ ← θ − α·m̂/(√v̂ + ε)"""
    skipped = state.skipped
    updated = adam_update(params.tensors, grads.tensors, state)
    if state.skipped != skipped:
        return params, state
    return params.with_tensors(updated), state


def clip_gradients(grads: NetworkParams, max_norm: Optional[float]) -> NetworkParams:
    """전역 L2 노름이 max_norm을 넘으면 비례 축소 (None이면 그대로)"""
    if max_norm is None:
        return grads
    norm = float(np.sqrt(sum(float(np.sum(t * t)) for t in grads.tensors.values())))
    if not np.isfinite(norm) or norm <= max_norm:
        return grads
    scale = max_norm / norm
    return grads.with_tensors({n: t * scale for n, t in grads.tensors.items()})
