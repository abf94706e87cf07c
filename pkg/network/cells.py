"""
LSTM / RNN / GRU 셀 순전파·역전파 (배치 단위)

모든 함수는 x: (B, in), h: (B, H) 배치 배열을 받는다.
가중치는 (H, in) / (H, H) 모양이므로 사전활성값은 x @ W.T + h @ U.T + b.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from utils.errors import ShapeMismatchError

from .params import CellType

Tensors = Dict[str, np.ndarray]


def sigmoid(z: np.ndarray) -> np.ndarray:
    # exp 오버플로 없이 계산
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class LstmState:
    """h: 은닉 벡터, c: 셀 벡터 (RNN/GRU는 c를 쓰지 않음)"""

    h: np.ndarray
    c: Optional[np.ndarray] = None

    @classmethod
    def zeros(cls, batch: int, hidden_dim: int, cell: CellType = CellType.LSTM) -> "LstmState":
        c = np.zeros((batch, hidden_dim)) if CellType(cell) == CellType.LSTM else None
        return cls(h=np.zeros((batch, hidden_dim)), c=c)


def _check(x: np.ndarray, h: np.ndarray, w_x: np.ndarray, w_h: np.ndarray):
    if x.ndim != 2 or h.ndim != 2 or x.shape[0] != h.shape[0]:
        raise ShapeMismatchError(f"batch shapes differ: x{x.shape}, h{h.shape}")
    if x.shape[1] != w_x.shape[1] or h.shape[1] != w_h.shape[0]:
        raise ShapeMismatchError(
            f"input {x.shape[1]} / hidden {h.shape[1]} do not match weights {w_x.shape}, {w_h.shape}"
        )


def _pre(x, h, w_x, w_h, b):
    return x @ w_x.T + h @ w_h.T + b


# ────────────────────────────────────────
# LSTM
# ────────────────────────────────────────
def lstm_cell_forward(x: np.ndarray, prev: LstmState, p: Tensors) -> Tuple[LstmState, Dict[str, Any]]:
    """
    f = σ(W_xf·x + W_hf·h + b_f), i, o 동일 / c̃ = tanh(...)
    C = f∘C_prev + i∘c̃,  h = o∘tanh(C)
    """
    _check(x, prev.h, p["w_xf"], p["w_hf"])
    c_prev = prev.c if prev.c is not None else np.zeros_like(prev.h)
    f = sigmoid(_pre(x, prev.h, p["w_xf"], p["w_hf"], p["bias_f"]))
    i = sigmoid(_pre(x, prev.h, p["w_xi"], p["w_hi"], p["bias_i"]))
    o = sigmoid(_pre(x, prev.h, p["w_xo"], p["w_ho"], p["bias_o"]))
    g = np.tanh(_pre(x, prev.h, p["w_xc"], p["w_hc"], p["bias_c"]))
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    cache = {"x": x, "h_prev": prev.h, "c_prev": c_prev, "f": f, "i": i, "o": o, "g": g, "tanh_c": tanh_c}
    return LstmState(h=h, c=c), cache


def lstm_cell_backward(
    dh: np.ndarray, dc_next: np.ndarray, cache: Dict[str, Any], p: Tensors, grads: Tensors
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """grads에 누적하고 (dx, dh_prev, dc_prev) 반환"""
    f, i, o, g, tanh_c = cache["f"], cache["i"], cache["o"], cache["g"], cache["tanh_c"]
    x, h_prev, c_prev = cache["x"], cache["h_prev"], cache["c_prev"]

    dc = dc_next + dh * o * (1.0 - tanh_c ** 2)
    dz = {
        "f": dc * c_prev * f * (1.0 - f),
        "i": dc * g * i * (1.0 - i),
        "o": dh * tanh_c * o * (1.0 - o),
        "c": dc * i * (1.0 - g ** 2),
    }
    dx = np.zeros_like(x)
    dh_prev = np.zeros_like(h_prev)
    for gate, d in dz.items():
        grads[f"w_x{gate}"] += d.T @ x
        grads[f"w_h{gate}"] += d.T @ h_prev
        grads[f"bias_{gate}"] += d.sum(axis=0)
        dx += d @ p[f"w_x{gate}"]
        dh_prev += d @ p[f"w_h{gate}"]
    return dx, dh_prev, dc * f


# ────────────────────────────────────────
# 단순 RNN
# ────────────────────────────────────────
def rnn_cell_forward(x: np.ndarray, prev: LstmState, p: Tensors) -> Tuple[LstmState, Dict[str, Any]]:
    """h = tanh(W_x·x + W_h·h_prev + b)"""
    _check(x, prev.h, p["w_x"], p["w_h"])
    h = np.tanh(_pre(x, prev.h, p["w_x"], p["w_h"], p["bias"]))
    return LstmState(h=h), {"x": x, "h_prev": prev.h, "h": h}


def rnn_cell_backward(dh, dc_next, cache, p: Tensors, grads: Tensors):
    d = dh * (1.0 - cache["h"] ** 2)
    grads["w_x"] += d.T @ cache["x"]
    grads["w_h"] += d.T @ cache["h_prev"]
    grads["bias"] += d.sum(axis=0)
    return d @ p["w_x"], d @ p["w_h"], None


# ────────────────────────────────────────
# GRU
# ────────────────────────────────────────
def gru_cell_forward(x: np.ndarray, prev: LstmState, p: Tensors) -> Tuple[LstmState, Dict[str, Any]]:
    """
    z = σ(W_xz·x + W_hz·h + b_z), r = σ(W_xr·x + W_hr·h + b_r)
    ñ = tanh(W_xn·x + W_hn·(r∘h) + b_n),  h_new = (1 − z)∘h + z∘ñ
    """
    _check(x, prev.h, p["w_xz"], p["w_hz"])
    h_prev = prev.h
    z = sigmoid(_pre(x, h_prev, p["w_xz"], p["w_hz"], p["bias_z"]))
    r = sigmoid(_pre(x, h_prev, p["w_xr"], p["w_hr"], p["bias_r"]))
    rh = r * h_prev
    n = np.tanh(_pre(x, rh, p["w_xn"], p["w_hn"], p["bias_n"]))
    h = (1.0 - z) * h_prev + z * n
    return LstmState(h=h), {"x": x, "h_prev": h_prev, "z": z, "r": r, "rh": rh, "n": n}


def gru_cell_backward(dh, dc_next, cache, p: Tensors, grads: Tensors):
    x, h_prev, z, r, rh, n = (cache[k] for k in ("x", "h_prev", "z", "r", "rh", "n"))

    dn = dh * z * (1.0 - n ** 2)
    dz = dh * (n - h_prev) * z * (1.0 - z)
    drh = dn @ p["w_hn"]
    dr = drh * h_prev * r * (1.0 - r)

    grads["w_xn"] += dn.T @ x
    grads["w_hn"] += dn.T @ rh
    grads["bias_n"] += dn.sum(axis=0)
    grads["w_xz"] += dz.T @ x
    grads["w_hz"] += dz.T @ h_prev
    grads["bias_z"] += dz.sum(axis=0)
    grads["w_xr"] += dr.T @ x
    grads["w_hr"] += dr.T @ h_prev
    grads["bias_r"] += dr.sum(axis=0)

    dx = dn @ p["w_xn"] + dz @ p["w_xz"] + dr @ p["w_xr"]
    dh_prev = dh * (1.0 - z) + drh * r + dz @ p["w_hz"] + dr @ p["w_hr"]
    return dx, dh_prev, None


CELL_FORWARD = {
    CellType.LSTM: lstm_cell_forward,
    CellType.RNN: rnn_cell_forward,
    CellType.GRU: gru_cell_forward,
}

CELL_BACKWARD = {
    CellType.LSTM: lstm_cell_backward,
    CellType.RNN: rnn_cell_backward,
    CellType.GRU: gru_cell_backward,
}
