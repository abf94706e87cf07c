"""
순환 신경망 파라미터 컨테이너

셀 종류(lstm / rnn / gru)마다 텐서 이름과 순서가 정해져 있고,
직렬화와 PSO 평탄화는 모두 이 선언 순서를 따른다.
층 0 텐서는 접두어가 없고, 층 l ≥ 1 텐서는 "l{l}_" 접두어를 붙인다.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ShapeMismatchError


class CellType(str, Enum):
    LSTM = "lstm"
    RNN = "rnn"
    GRU = "gru"


# 셀별 (입력측, 은닉측, 편향) 텐서 이름
CELL_TENSORS: Dict[CellType, Tuple[Tuple[str, ...], Tuple[str, ...], Tuple[str, ...]]] = {
    CellType.LSTM: (
        ("w_xf", "w_xi", "w_xc", "w_xo"),
        ("w_hf", "w_hi", "w_hc", "w_ho"),
        ("bias_f", "bias_i", "bias_c", "bias_o"),
    ),
    CellType.RNN: (("w_x",), ("w_h",), ("bias",)),
    CellType.GRU: (
        ("w_xz", "w_xr", "w_xn"),
        ("w_hz", "w_hr", "w_hn"),
        ("bias_z", "bias_r", "bias_n"),
    ),
}

HEAD_TENSORS: Tuple[str, str] = ("w_out", "bias_out")


def layer_prefix(layer: int) -> str:
    return "" if layer == 0 else f"l{layer}_"


def tensor_names(cell: CellType, num_layers: int = 1) -> List[str]:
    """선언 순서: 층 0 (입력측, 은닉측, 편향), 층 1, ..., 출력 헤드"""
    x_names, h_names, b_names = CELL_TENSORS[CellType(cell)]
    names: List[str] = []
    for layer in range(num_layers):
        prefix = layer_prefix(layer)
        names.extend(prefix + n for n in (*x_names, *h_names, *b_names))
    names.extend(HEAD_TENSORS)
    return names


def input_side_names(cell: CellType) -> List[str]:
    """PSO가 다루는 층 0 입력측 행렬 이름"""
    return list(CELL_TENSORS[CellType(cell)][0])


def expected_shapes(
    cell: CellType, input_dim: int, hidden_dim: int, output_dim: int, num_layers: int
) -> Dict[str, Tuple[int, ...]]:
    x_names, h_names, b_names = CELL_TENSORS[CellType(cell)]
    shapes: Dict[str, Tuple[int, ...]] = {}
    for layer in range(num_layers):
        prefix = layer_prefix(layer)
        in_dim = input_dim if layer == 0 else hidden_dim
        for n in x_names:
            shapes[prefix + n] = (hidden_dim, in_dim)
        for n in h_names:
            shapes[prefix + n] = (hidden_dim, hidden_dim)
        for n in b_names:
            shapes[prefix + n] = (hidden_dim,)
    shapes["w_out"] = (output_dim, hidden_dim)
    shapes["bias_out"] = (output_dim,)
    return shapes


@dataclass
class NetworkParams:
    """
    셀 종류와 차원, 선언 순서대로 정렬된 텐서 묶음.
    기울기 묶음(GradientSet)도 같은 구조를 쓴다.
    """

    cell: CellType
    input_dim: int
    hidden_dim: int
    output_dim: int
    num_layers: int = 1
    tensors: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.cell = CellType(self.cell)
        shapes = expected_shapes(
            self.cell, self.input_dim, self.hidden_dim, self.output_dim, self.num_layers
        )
        missing = [n for n in shapes if n not in self.tensors]
        extra = [n for n in self.tensors if n not in shapes]
        if missing or extra:
            raise ShapeMismatchError(f"tensor names mismatch (missing={missing}, extra={extra})")
        ordered: Dict[str, np.ndarray] = {}
        for name, shape in shapes.items():
            arr = np.asarray(self.tensors[name], dtype=np.float64)
            if arr.shape != shape:
                raise ShapeMismatchError(f"{name}: expected shape {shape}, got {arr.shape}")
            ordered[name] = arr
        self.tensors = ordered

    # ────────────────────────────────────────
    # 조회
    # ────────────────────────────────────────
    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    @property
    def names(self) -> List[str]:
        return list(self.tensors)

    @property
    def size(self) -> int:
        return int(sum(t.size for t in self.tensors.values()))

    def layer(self, layer: int) -> Dict[str, np.ndarray]:
        """층 l 텐서를 접두어 없는 이름으로 반환"""
        prefix = layer_prefix(layer)
        x_names, h_names, b_names = CELL_TENSORS[self.cell]
        return {n: self.tensors[prefix + n] for n in (*x_names, *h_names, *b_names)}

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(t)) for t in self.tensors.values())

    def dims(self) -> Dict[str, int]:
        return {
            "input_dim": self.input_dim,
            "hidden_dim": self.hidden_dim,
            "output_dim": self.output_dim,
            "num_layers": self.num_layers,
        }

    # ────────────────────────────────────────
    # 생성/변환
    # ────────────────────────────────────────
    def with_tensors(self, tensors: Dict[str, np.ndarray]) -> "NetworkParams":
        return NetworkParams(
            cell=self.cell,
            input_dim=self.input_dim,
            hidden_dim=self.hidden_dim,
            output_dim=self.output_dim,
            num_layers=self.num_layers,
            tensors=tensors,
        )

    def copy(self) -> "NetworkParams":
        return self.with_tensors({n: t.copy() for n, t in self.tensors.items()})

    def zeros_like(self) -> "NetworkParams":
        return self.with_tensors({n: np.zeros_like(t) for n, t in self.tensors.items()})

    def flatten(self, names: Optional[Sequence[str]] = None) -> np.ndarray:
        names = self.names if names is None else list(names)
        return np.concatenate([self.tensors[n].ravel() for n in names])

    def with_flat(self, vector: np.ndarray, names: Optional[Sequence[str]] = None) -> "NetworkParams":
        """names 텐서만 vector 값으로 교체한 사본"""
        names = self.names if names is None else list(names)
        vector = np.asarray(vector, dtype=np.float64)
        expected = sum(self.tensors[n].size for n in names)
        if vector.size != expected:
            raise ShapeMismatchError(f"flat vector has {vector.size} values, expected {expected}")
        tensors = {n: t.copy() for n, t in self.tensors.items()}
        offset = 0
        for n in names:
            size = tensors[n].size
            tensors[n] = vector[offset:offset + size].reshape(tensors[n].shape).copy()
            offset += size
        return self.with_tensors(tensors)

    def flat_size(self, names: Iterable[str]) -> int:
        return int(sum(self.tensors[n].size for n in names))

    def equals(self, other: "NetworkParams") -> bool:
        """비트 단위 동일 여부"""
        if self.cell != other.cell or self.dims() != other.dims():
            return False
        return all(np.array_equal(self.tensors[n], other.tensors[n]) for n in self.names)


# 기울기 묶음은 파라미터와 같은 모양
GradientSet = NetworkParams


def init_params(
    cell: CellType,
    input_dim: int,
    hidden_dim: int,
    output_dim: int,
    num_layers: int = 1,
    rng: Optional[np.random.Generator] = None,
    seed: Optional[int] = None,
) -> NetworkParams:
    """
    균등분포 [−1/√fan_in, 1/√fan_in] 초기화

    입력측 행렬은 해당 층 입력 차원, 나머지(은닉측, 편향, 출력 헤드)는 은닉 차원을 fan_in으로 쓴다.
    """
    if min(input_dim, hidden_dim, output_dim, num_layers) < 1:
        raise ValueError("all network dimensions must be ≥ 1")
    rng = rng if rng is not None else np.random.default_rng(seed)
    cell = CellType(cell)
    x_names = set(CELL_TENSORS[cell][0])
    tensors: Dict[str, np.ndarray] = {}
    for name, shape in expected_shapes(cell, input_dim, hidden_dim, output_dim, num_layers).items():
        base = name.split("_", 1)[1] if name.startswith("l") and name[1].isdigit() else name
        if base in x_names:
            fan_in = shape[1]
        else:
            fan_in = hidden_dim
        bound = 1.0 / np.sqrt(fan_in)
        tensors[name] = rng.uniform(-bound, bound, size=shape)
    return NetworkParams(cell, input_dim, hidden_dim, output_dim, num_layers, tensors)


def zero_params(
    cell: CellType, input_dim: int, hidden_dim: int, output_dim: int, num_layers: int = 1
) -> NetworkParams:
    shapes = expected_shapes(CellType(cell), input_dim, hidden_dim, output_dim, num_layers)
    return NetworkParams(
        cell, input_dim, hidden_dim, output_dim, num_layers,
        {n: np.zeros(s) for n, s in shapes.items()},
    )
