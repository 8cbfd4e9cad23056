"""
Error Hierarchy

gmatch 전역 예외 정의. 모든 예외는 builtin 예외를 상속하므로
호출부에서는 ValueError / RuntimeError 로도 잡을 수 있습니다.
"""

from typing import Optional


class GMatchError(Exception):
    """gmatch 예외의 공통 베이스"""


class ConfigError(GMatchError, ValueError):
    """설정값이 불변식을 위반한 경우"""


class InputError(GMatchError, ValueError):
    """입력 텐서/그래프의 shape 또는 값이 잘못된 경우"""


class UnsupportedDimensionError(InputError):
    """지원하지 않는 좌표 차원 (예: 3D 회전)"""


class DomainError(GMatchError, ValueError):
    """수치 연산의 정의역 위반 (0 이하 입력, NaN 등)"""


class DegenerateAffinityError(DomainError):
    """M z = 0 이 되어 정규화할 수 없는 affinity"""


class UsageError(GMatchError, RuntimeError):
    """API 사용 순서 오류 (예: tape 재사용)"""


class UnknownVariantError(GMatchError, KeyError):
    """등록되지 않은 ablation variant id"""


class CheckpointError(GMatchError, ValueError):
    """체크포인트 파일 손상. offset 은 문제를 발견한 바이트 위치."""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset={offset})"
        super().__init__(message)


class CheckpointVersionError(CheckpointError):
    """지원하지 않는 체크포인트 포맷 버전"""


class TrainingAbortedError(GMatchError, RuntimeError):
    """학습 중 NaN/Inf 발생으로 중단. last_good 은 마지막 정상 체크포인트 경로."""

    def __init__(self, message: str, last_good: Optional[str] = None):
        self.last_good = last_good
        super().__init__(message)
