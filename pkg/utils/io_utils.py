"""
산출물 저장 유틸리티

모든 명령은 결과를 메모리에 모은 뒤 OutputBundle.commit()으로 한 번에 기록한다.
각 파일은 같은 디렉토리의 임시 파일에 쓴 다음 os.replace로 교체되므로
실패한 실행이 부분 산출물을 남기지 않는다.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from .logger import get_logger

logger = get_logger(__name__)


def get_file_hash(file_path: Path) -> str:
    """파일의 SHA-256 해시 계산"""
    hasher = hashlib.sha256()
    with Path(file_path).open('rb') as f:
        for chunk in iter(lambda: f.read(65536), b""):
            hasher.update(chunk)
    return hasher.hexdigest()


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """임시 파일 → os.replace 방식의 원자적 쓰기"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def frame_to_csv_bytes(frame: pd.DataFrame) -> bytes:
    # repr 정밀도(%.17g 수준)로 써야 재실행 시 비트 단위로 같은 CSV가 나온다
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n").encode("utf-8")


class OutputBundle:
    """명령 하나의 산출물 묶음 (commit 전까지는 디스크에 쓰지 않음)"""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self._pending: List[Tuple[Path, bytes]] = []

    def add_bytes(self, relative: str, data: bytes) -> Path:
        path = self.out_dir / relative
        self._pending.append((path, data))
        return path

    def add_text(self, relative: str, text: str) -> Path:
        return self.add_bytes(relative, text.encode("utf-8"))

    def add_frame(self, relative: str, frame: pd.DataFrame) -> Path:
        return self.add_bytes(relative, frame_to_csv_bytes(frame))

    def add_json(self, relative: str, payload: Any) -> Path:
        text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True)
        return self.add_text(relative, text + "\n")

    @property
    def paths(self) -> List[Path]:
        return [p for p, _ in self._pending]

    def commit(self) -> List[Path]:
        for path, data in self._pending:
            atomic_write_bytes(path, data)
            logger.info(f"💾 저장 → {path}")
        written = self.paths
        self._pending = []
        return written


class RunManifest(BaseModel):
    """실행 재현용 매니페스트 (산출물과 함께 원자적으로 기록)"""

    command: str
    tool_version: str
    master_seed: int
    config: Dict[str, Any] = Field(default_factory=dict)
    inputs: Dict[str, str] = Field(default_factory=dict, description="입력 파일 경로 → SHA-256")
    timings: Dict[str, float] = Field(default_factory=dict, description="단계별 소요 시간(초)")
    arguments: Dict[str, Any] = Field(default_factory=dict, description="명령별 인자")
    created_at: str = Field(default_factory=lambda: datetime.now().isoformat(timespec="seconds"))

    def to_payload(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    @classmethod
    def load(cls, path: Path) -> "RunManifest":
        with Path(path).open("r", encoding="utf-8") as f:
            return cls.model_validate(json.load(f))

    def record_input(self, path: Optional[Path]) -> None:
        if path is not None:
            self.inputs[str(path)] = get_file_hash(Path(path))
