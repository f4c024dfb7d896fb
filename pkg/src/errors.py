"""
공통 예외 클래스

CLI 종료 코드와 1:1로 대응합니다:
    ConfigError        → 1 (설정/사용법 오류)
    DataError          → 2 (데이터 오류)
    ProtocolError      → 2 (분할/평가 프로토콜 위반)
    VerificationError  → 3 (불변식 검증 실패)
"""

from typing import Optional


class ConfigError(ValueError):
    """잘못된 설정값 또는 플래그"""
    exit_code = 1


class DataError(ValueError):
    """읽을 수 없거나 형식이 잘못된 데이터"""
    exit_code = 2

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ProtocolError(DataError):
    """학습/테스트 분할 규약 위반 (분할 버그 징후)"""


class VerificationError(RuntimeError):
    """verify 스위트에서 하나 이상의 검사가 실패"""
    exit_code = 3
