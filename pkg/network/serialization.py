"""
모델 파라미터 바이너리 포맷

헤더: magic "LFNN", 포맷 버전(u16), 셀 이름, 차원 블록(input, hidden, output, layers),
텐서 개수 후 선언 순서대로 [이름, 차원 수, 모양, little-endian float64 값].
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import Dict

import numpy as np

from utils.errors import DataError
from utils.io_utils import atomic_write_bytes

from .params import NetworkParams

MAGIC = b"LFNN"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sH")
_DIMS = struct.Struct("<IIIII")


def _pack_text(text: str) -> bytes:
    raw = text.encode("utf-8")
    return struct.pack("<H", len(raw)) + raw


def params_to_bytes(params: NetworkParams) -> bytes:
    chunks = [_HEADER.pack(MAGIC, FORMAT_VERSION), _pack_text(params.cell.value)]
    chunks.append(
        _DIMS.pack(
            params.input_dim, params.hidden_dim, params.output_dim, params.num_layers, len(params.tensors)
        )
    )
    for name, tensor in params.tensors.items():
        chunks.append(_pack_text(name))
        chunks.append(struct.pack("<B", tensor.ndim))
        chunks.append(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        chunks.append(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise DataError("model file truncated")
        chunk = self.data[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str):
        st = struct.Struct(fmt)
        return st.unpack(self.take(st.size))

    def text(self) -> str:
        (length,) = self.unpack("<H")
        return self.take(length).decode("utf-8")


def params_from_bytes(data: bytes) -> NetworkParams:
    reader = _Reader(data)
    magic, version = reader.unpack(_HEADER.format)
    if magic != MAGIC:
        raise DataError("not a model file (bad magic)")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version}")
    cell = reader.text()
    input_dim, hidden_dim, output_dim, num_layers, count = reader.unpack(_DIMS.format)

    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        name = reader.text()
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I") if ndim else ()
        size = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(reader.take(8 * size), dtype="<f8")
        tensors[name] = values.astype(np.float64).reshape(shape)
    if reader.offset != len(data):
        raise DataError("trailing bytes after model tensors")
    return NetworkParams(cell, input_dim, hidden_dim, output_dim, num_layers, tensors)


def save_params(params: NetworkParams, path: Path) -> None:
    atomic_write_bytes(Path(path), params_to_bytes(params))


def load_params(path: Path) -> NetworkParams:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"모델 파일이 없습니다: {path}")
    return params_from_bytes(path.read_bytes())
