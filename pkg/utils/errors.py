"""
부하 예측 파이프라인 공통 예외 정의

DataError 계열은 입력/데이터 문제(CLI 종료 코드 2),
NumericError 계열은 수치 계산 실패(CLI 종료 코드 3)를 나타낸다.
"""
from __future__ import annotations

from typing import Optional


class LoadForecastError(Exception):
    """프로젝트 최상위 예외"""


class DataError(LoadForecastError, ValueError):
    """입력 파일, 행, 간격, 범위 등 데이터 관련 오류"""


class NumericError(LoadForecastError, ArithmeticError):
    """비유한 값, 적합도 평가 실패 등 수치 관련 오류"""


class DegenerateRangeError(DataError):
    """x_max == x_min 인 상수 성분 (정규화 불가)"""


class InsufficientExtremaError(DataError):
    """포락선/분해에 필요한 극값이 부족함"""


class InsufficientHistoryError(DataError):
    """윈도우 구성 또는 예측에 필요한 일수가 부족함"""


class ShapeMismatchError(DataError):
    """텐서/벡터 형상 불일치"""


class ZeroActualError(DataError):
    """MAPE 계산 시 실제값 0 (나눗셈 보호)"""


class FitnessEvaluationError(NumericError):
    """PSO 입자 적합도 평가 실패"""

    def __init__(self, particle_index: int, cause: BaseException):
        self.particle_index = particle_index
        self.cause = cause
        super().__init__(f"fitness evaluation failed for particle {particle_index}: {cause}")


class ComponentError(LoadForecastError):
    """특정 성분 모델 처리 중 발생한 오류 (원래 예외 분류 유지용 래퍼)"""

    def __init__(self, component_id: int, stage: str, cause: BaseException):
        self.component_id = component_id
        self.stage = stage
        self.cause = cause
        super().__init__(f"component {component_id} failed at {stage}: {cause}")


def exit_code_for(exc: BaseException) -> Optional[int]:
    """예외를 CLI 종료 코드로 매핑 (해당 없으면 None)"""
    if isinstance(exc, ComponentError):
        return exit_code_for(exc.cause)
    if isinstance(exc, (DataError, FileNotFoundError)):
        return 2
    if isinstance(exc, NumericError):
        return 3
    return None
