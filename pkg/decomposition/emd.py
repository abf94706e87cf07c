"""
경험적 모드 분해 (EMD)

sift: h ← h − (e_max + e_min)/2 를 SD 비율이 임계값 아래로 내려가고
IMF 조건 1을 만족할 때까지 반복한다 (최대 max_sift_iters회).
decompose: 잔차에서 IMF를 차례로 뽑아 S = ΣIMF + Res 로 분해한다.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from utils import get_logger
from utils.errors import DataError, InsufficientExtremaError

from .envelope import (
    BoundaryPolicy,
    find_extrema,
    imf_condition_holds,
    spline_envelope,
)

logger = get_logger(__name__)


class SiftConfig(BaseModel):
    sd_threshold: float = Field(0.2, gt=0, description="SD 정지 비율 임계값")
    max_sift_iters: int = Field(10, ge=1, description="IMF 하나당 최대 sift 횟수")
    max_imfs: int = Field(16, ge=1, description="최대 IMF 개수")
    boundary_policy: BoundaryPolicy = Field(BoundaryPolicy.MIRROR, description="포락선 끝단 처리")


class MixScheme(str, Enum):
    SEPARATE = "separate"  # IMF 1..n 합 + 나머지 IMF/Res 각각 개별 성분
    TWO_PART = "two-part"  # IMF 1..n 합(고주파) + 나머지 IMF와 Res 합(저주파)


@dataclass
class SiftOutcome:
    imf: np.ndarray
    iterations: int
    converged: bool
    imf_condition: bool


@dataclass
class ImfSet:
    """imfs: (K, n), residual: (n,). flagged[k]는 k번째 IMF 추출에서 경고가 났는지 여부 (반복 상한 또는 IMF 조건 위반)"""

    imfs: np.ndarray
    residual: np.ndarray
    flagged: List[bool] = field(default_factory=list)

    @property
    def n_imfs(self) -> int:
        return int(self.imfs.shape[0])

    @property
    def components(self) -> np.ndarray:
        return np.vstack((self.imfs, self.residual[None, :]))

    @property
    def labels(self) -> List[str]:
        return [f"imf{k + 1}" for k in range(self.n_imfs)] + ["res"]

    def reconstruct(self) -> np.ndarray:
        return self.imfs.sum(axis=0) + self.residual

    def to_frame(self, timestamps: Optional[Sequence] = None) -> pd.DataFrame:
        """imf1..imfK,res 열을 가진 시간별 wide 테이블"""
        frame = pd.DataFrame(self.components.T, columns=self.labels)
        if timestamps is not None:
            frame.insert(0, "timestamp", list(timestamps))
        return frame


@dataclass
class FrequencyParts:
    parts: np.ndarray
    mix_index: int
    labels: List[str]

    def __len__(self) -> int:
        return int(self.parts.shape[0])

    def total(self) -> np.ndarray:
        return self.parts.sum(axis=0)


def sift_once(h: np.ndarray, cfg: SiftConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    한 번의 sift: 상/하 포락선 평균을 빼낸다

    Returns:
        (h − m, m)  단 m = (e_max + e_min) / 2
    """
    h = np.asarray(h, dtype=np.float64)
    ext = find_extrema(h)
    if ext.max_idx.size < 1 or ext.min_idx.size < 1:
        raise InsufficientExtremaError(
            f"insufficient extrema: {ext.max_idx.size} maxima, {ext.min_idx.size} minima"
        )
    upper = spline_envelope(ext.max_idx, ext.max_val, h.size, cfg.boundary_policy)
    lower = spline_envelope(ext.min_idx, ext.min_val, h.size, cfg.boundary_policy)
    mean = (upper + lower) / 2.0
    return h - mean, mean


def _sd_ratio(previous: np.ndarray, current: np.ndarray) -> float:
    denom = float(np.sum(previous ** 2))
    if denom == 0.0:
        return 0.0
    return float(np.sum((previous - current) ** 2) / denom)


def sift_to_imf(r: np.ndarray, cfg: SiftConfig) -> SiftOutcome:
    """extract_imf의 상세 버전 (반복 횟수, 수렴 여부 포함)"""
    h = np.asarray(r, dtype=np.float64).copy()
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_sift_iters + 1):
        try:
            candidate, _ = sift_once(h, cfg)
        except InsufficientExtremaError:
            if iterations == 1:
                raise
            # 반복 도중 극값이 사라지면 직전 결과를 IMF로 사용
            iterations -= 1
            break
        sd = _sd_ratio(h, candidate)
        h = candidate
        if sd < cfg.sd_threshold:
            converged = True
            break

    condition = imf_condition_holds(h)
    if not converged:
        logger.warning(
            f"⚠️ sift 반복 상한 도달 ({iterations}회, IMF 조건 {'충족' if condition else '위반'})"
        )
    elif not condition:
        logger.warning(f"⚠️ sift SD 기준으로 정지했으나 IMF 조건 위반 ({iterations}회)")
    return SiftOutcome(imf=h, iterations=iterations, converged=converged, imf_condition=condition)


def extract_imf(r: np.ndarray, cfg: SiftConfig) -> np.ndarray:
    """잔차 r에서 IMF 하나 추출"""
    return sift_to_imf(r, cfg).imf


def decompose(series: np.ndarray, cfg: Optional[SiftConfig] = None) -> ImfSet:
    """
    S = ΣIMF + Res 분해

    잔차의 극값이 2개 이하가 되거나 max_imfs에 도달하면 멈춘다.
    마지막 잔차는 입력에서 IMF 합을 빼서 다시 계산하므로 복원 오차가 누적되지 않는다.
    """
    cfg = cfg or SiftConfig()
    s = np.asarray(series, dtype=np.float64)
    if s.ndim != 1 or s.size < 4:
        raise DataError("input too short for EMD (need ≥ 4 points)")
    first = find_extrema(s)
    if first.max_idx.size < 1 or first.min_idx.size < 1 or first.count < 2:
        raise InsufficientExtremaError("insufficient extrema: input too flat to decompose")

    imfs: List[np.ndarray] = []
    flagged: List[bool] = []
    residual = s.copy()
    while len(imfs) < cfg.max_imfs:
        ext = find_extrema(residual)
        if imfs and (ext.count <= 2 or ext.max_idx.size < 1 or ext.min_idx.size < 1):
            break
        outcome = sift_to_imf(residual, cfg)
        imfs.append(outcome.imf)
        flagged.append(not (outcome.converged and outcome.imf_condition))
        residual = residual - outcome.imf

    imf_array = np.vstack(imfs)
    result = ImfSet(imfs=imf_array, residual=s - imf_array.sum(axis=0), flagged=flagged)
    logger.info(f"🌊 EMD 완료 — IMF {result.n_imfs}개 + Res (길이 {s.size})")
    return result


def recombine(
    imf_set: ImfSet,
    mix_index: int,
    scheme: MixScheme = MixScheme.SEPARATE,
) -> FrequencyParts:
    """
    MIXn 재조합

    separate: [IMF1..n 합, IMF n+1, ..., IMF K, Res]
    two-part: [IMF1..n 합, IMF n+1..K 합 + Res]
    """
    k = imf_set.n_imfs
    if not 1 <= mix_index <= k:
        raise DataError(f"mix index {mix_index} out of range 1..{k}")

    high = imf_set.imfs[:mix_index].sum(axis=0)
    high_label = "imf1" if mix_index == 1 else f"imf1-{mix_index}"
    scheme = MixScheme(scheme)
    if scheme == MixScheme.SEPARATE:
        rest = [imf_set.imfs[j] for j in range(mix_index, k)]
        parts = np.vstack([high, *rest, imf_set.residual])
        labels = [high_label] + [f"imf{j + 1}" for j in range(mix_index, k)] + ["res"]
    else:
        low = imf_set.imfs[mix_index:].sum(axis=0) + imf_set.residual
        parts = np.vstack([high, low])
        labels = [high_label, "low"]
    return FrequencyParts(parts=parts, mix_index=mix_index, labels=labels)
