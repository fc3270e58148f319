"""
표준화된 에러 처리 시스템

시뮬레이터 전체에서 일관된 에러 형식과 로깅, CLI 종료 코드 매핑을 제공합니다.

주요 기능:
- StandardError 계층 (도메인/계약/수치/차원/설정 에러)
- 심각도 기반 에러 로깅과 카테고리별 통계
- 카테고리 → 종료 코드 (설정 오류 2, 그 밖의 실패 1)
"""

import sys
import traceback
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from functools import wraps
from typing import Any, Dict, Optional

from src.utils.logging_config import get_logger

logger = get_logger(__name__)


class ErrorSeverity(Enum):
    """에러 심각도 레벨"""
    LOW = "low"        # 입력 오류, 호출자가 수정 가능
    MEDIUM = "medium"  # 계산 경로 실패
    HIGH = "high"      # 설정 오류, 실행 중단
    CRITICAL = "critical"


class ErrorCategory(Enum):
    """에러 카테고리 분류"""
    VALIDATION = "validation"    # 파라미터 범위/계약 위반
    NUMERICAL = "numerical"      # 수치적으로 정의되지 않는 결과
    CONFIGURATION = "config"     # 설정 파일/환경 변수 오류
    SYSTEM = "system"
    UNKNOWN = "unknown"


_PREFIXES = {
    ErrorCategory.VALIDATION: "VAL",
    ErrorCategory.NUMERICAL: "NUM",
    ErrorCategory.CONFIGURATION: "CFG",
    ErrorCategory.SYSTEM: "SYS",
    ErrorCategory.UNKNOWN: "UNK",
}

_EXIT_CODES = {ErrorCategory.CONFIGURATION: 2}


@dataclass
class ErrorContext:
    """에러 발생 위치 (모듈, 함수)"""
    timestamp: datetime = field(default_factory=datetime.now)
    component: Optional[str] = None
    operation: Optional[str] = None


class StandardError(Exception):
    """
    시뮬레이터 예외의 기본 클래스

    하위 클래스는 category / severity / recovery_suggestion 클래스 속성으로 기본값을 정하고,
    error_code 는 "<카테고리 접두사>_<클래스 이름>" 형태로 만들어집니다 (예: VAL_DOMAINERROR).
    """

    category: ErrorCategory = ErrorCategory.UNKNOWN
    severity: ErrorSeverity = ErrorSeverity.MEDIUM
    recovery_suggestion: Optional[str] = None

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        category: Optional[ErrorCategory] = None,
        severity: Optional[ErrorSeverity] = None,
        context: Optional[ErrorContext] = None,
        cause: Optional[Exception] = None,
        recovery_suggestion: Optional[str] = None,
    ):
        super().__init__(message)
        self.message = message
        if category is not None:
            self.category = category
        if severity is not None:
            self.severity = severity
        if recovery_suggestion is not None:
            self.recovery_suggestion = recovery_suggestion
        self.error_code = error_code or f"{_PREFIXES.get(self.category, 'ERR')}_{type(self).__name__.upper()}"
        self.context = context or ErrorContext()
        self.cause = cause
        self.traceback = traceback.format_exc() if sys.exc_info()[0] else None

    @property
    def exit_code(self) -> int:
        """CLI 종료 코드"""
        return _EXIT_CODES.get(self.category, 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error_code": self.error_code,
            "message": self.message,
            "category": self.category.value,
            "severity": self.severity.value,
            "timestamp": self.context.timestamp.isoformat(),
            "component": self.context.component,
            "operation": self.context.operation,
            "recovery_suggestion": self.recovery_suggestion,
            "cause": str(self.cause) if self.cause else None,
        }


class ErrorHandler:
    """
    중앙화된 에러 처리기

    일반 예외를 StandardError 로 변환하고, 심각도에 맞춰 로깅하며 통계를 남기는 싱글톤입니다.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, "initialized"):
            self.error_stats: Dict[str, int] = {}
            self.initialized = True

    def handle_error(
        self,
        error: Exception,
        context: Optional[ErrorContext] = None,
        raise_after_handling: bool = False,
    ) -> StandardError:
        """
        예외 처리 (변환 → 통계 → 로깅)

        StandardError 는 그대로 다시 발생시키고, 그 밖의 예외는 변환된 StandardError 로
        원인 예외를 연결해 발생시킵니다.
        """
        if isinstance(error, StandardError):
            std_error = error
            if context and std_error.context.operation is None:
                std_error.context = context
        else:
            std_error = self._convert(error, context)

        key = f"{std_error.category.value}:{std_error.error_code}"
        self.error_stats[key] = self.error_stats.get(key, 0) + 1
        self._log(std_error)

        if raise_after_handling:
            if std_error is error:
                raise std_error
            raise std_error from error
        return std_error

    def _convert(self, error: Exception, context: Optional[ErrorContext]) -> StandardError:
        category_map = {
            ValueError: ErrorCategory.VALIDATION,
            KeyError: ErrorCategory.VALIDATION,
            TypeError: ErrorCategory.VALIDATION,
            ZeroDivisionError: ErrorCategory.NUMERICAL,
            FloatingPointError: ErrorCategory.NUMERICAL,
            FileNotFoundError: ErrorCategory.CONFIGURATION,
            PermissionError: ErrorCategory.CONFIGURATION,
            OSError: ErrorCategory.SYSTEM,
            MemoryError: ErrorCategory.SYSTEM,
        }
        category = category_map.get(type(error), ErrorCategory.UNKNOWN)
        severity = {
            ErrorCategory.VALIDATION: ErrorSeverity.LOW,
            ErrorCategory.CONFIGURATION: ErrorSeverity.HIGH,
            ErrorCategory.SYSTEM: ErrorSeverity.CRITICAL,
        }.get(category, ErrorSeverity.MEDIUM)
        return StandardError(str(error), category=category, severity=severity, context=context, cause=error)

    def _log(self, error: StandardError):
        where = f"{error.context.component}.{error.context.operation}" if error.context.operation else "-"
        message = f"[{error.error_code}] {error.message} (at {where})"
        level = {
            ErrorSeverity.CRITICAL: logger.critical,
            ErrorSeverity.HIGH: logger.error,
            ErrorSeverity.MEDIUM: logger.warning,
        }.get(error.severity, logger.info)
        level(message)

    def get_error_stats(self) -> Dict[str, Any]:
        return {
            "total_errors": sum(self.error_stats.values()),
            "by_category": dict(self.error_stats),
            "most_common": max(self.error_stats, key=self.error_stats.get) if self.error_stats else None,
        }


# 글로벌 에러 핸들러 인스턴스
error_handler = ErrorHandler()


def handle_errors(raise_after: bool = True):
    """
    에러 처리 데코레이터

    Usage:
        @handle_errors()
        def cmd_analytic(config):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                context = ErrorContext(component=func.__module__, operation=func.__name__)
                return error_handler.handle_error(e, context, raise_after_handling=raise_after)

        return wrapper

    return decorator


# 도메인 에러 클래스들
class DomainError(StandardError, ValueError):
    """프로토콜 파라미터가 허용 범위를 벗어남 (예: s ∉ [0, 1])"""
    category = ErrorCategory.VALIDATION
    severity = ErrorSeverity.LOW

    def __init__(self, message: str, parameter: Optional[str] = None, value: Any = None, **kwargs):
        super().__init__(message, **kwargs)
        self.parameter = parameter
        self.value = value


class ContractError(StandardError, ValueError):
    """서로 모순되는 인자 (예: pair_overlap 과 실제 내적 불일치)"""
    category = ErrorCategory.VALIDATION
    severity = ErrorSeverity.LOW


class ProtocolError(StandardError, ValueError):
    """프로토콜 단계 입력이 불완전함"""
    category = ErrorCategory.VALIDATION
    severity = ErrorSeverity.LOW


class DimensionError(StandardError, ValueError):
    """Kraus 집합을 두 분기 Neumark 확장에 넣을 수 없음"""
    category = ErrorCategory.VALIDATION


class NumericalError(StandardError, ArithmeticError):
    """모든 결과 확률이 수치적으로 0"""
    category = ErrorCategory.NUMERICAL


class DegenerateSetupError(StandardError, ArithmeticError):
    """광학 배치의 총 검출 확률이 사실상 0"""
    category = ErrorCategory.NUMERICAL
    recovery_suggestion = "Reduce the PBS loss or mode mismatch bounds"

    def __init__(self, message: str, throughput: float = 0.0, **kwargs):
        super().__init__(message, **kwargs)
        self.throughput = throughput


class EmptyRunError(StandardError, ValueError):
    """카운팅 런이 비었거나 런 수가 부족함"""
    category = ErrorCategory.VALIDATION

    def __init__(self, message: str, run_index: Optional[int] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.run_index = run_index


class UnknownPortError(StandardError, KeyError):
    """존재하지 않는 포트/검출기 레이블"""
    category = ErrorCategory.VALIDATION
    severity = ErrorSeverity.LOW

    def __init__(self, message: str, port: Any = None, **kwargs):
        super().__init__(message, **kwargs)
        self.port = port

    def __str__(self) -> str:
        # KeyError 는 메시지를 repr 로 감쌈
        return self.message


class ConfigurationError(StandardError):
    """설정 파일, 명령행 옵션, 환경 변수 오류"""
    category = ErrorCategory.CONFIGURATION
    severity = ErrorSeverity.HIGH
    recovery_suggestion = "Check the configuration file and CLI options"

    def __init__(self, message: str, config_key: Optional[str] = None, **kwargs):
        super().__init__(message, **kwargs)
        self.config_key = config_key


def require_unit_interval(name: str, value: float) -> float:
    """[0, 1] 범위 검사. 벗어나면 (NaN 포함) DomainError."""
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}", parameter=name, value=value)
    return float(value)
