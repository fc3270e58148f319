"""
구조화된 로깅 시스템

텍스트 또는 한 줄 JSON 로그, 컨텍스트 로거, 실행 시간 측정 데코레이터를 제공합니다.
표준 출력은 CSV/JSON 결과 전용이므로 모든 로그는 stderr (와 선택적 LOG_FILE) 로 나갑니다.
"""

import json
import logging
import sys
import time
import traceback
from contextlib import contextmanager
from datetime import datetime, timezone
from functools import wraps
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional

import numpy as np

from src.utils.env_validator import get_optional_env

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _json_default(value: Any) -> Any:
    """numpy 스칼라/배열과 그 밖의 객체를 JSON 으로"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class StructuredFormatter(logging.Formatter):
    """레코드 하나를 JSON 객체 한 줄로 변환하는 포매터"""

    def __init__(self, include_traceback: bool = True):
        super().__init__()
        self.include_traceback = include_traceback

    def format(self, record: logging.LogRecord) -> str:
        log_data: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "where": f"{record.module}:{record.funcName}:{record.lineno}",
            "process": record.process,
        }
        if hasattr(record, "context"):
            log_data["context"] = record.context
        if hasattr(record, "extra_fields"):
            log_data.update(record.extra_fields)

        if record.exc_info and self.include_traceback:
            exc_type, exc_value, exc_tb = record.exc_info
            log_data["exception"] = {
                "type": exc_type.__name__ if exc_type else None,
                "message": str(exc_value),
                "traceback": traceback.format_exception(exc_type, exc_value, exc_tb),
            }

        try:
            return json.dumps(log_data, ensure_ascii=False, default=_json_default)
        except (TypeError, ValueError) as e:
            return json.dumps({"error": f"Failed to serialize log: {e}", "message": record.getMessage()})


class ContextLogger(logging.LoggerAdapter):
    """
    컨텍스트 정보를 포함하는 로거

    호출 시의 extra 는 유지하고 extra["context"] 에 현재 컨텍스트를 붙입니다.
    """

    def __init__(self, logger: logging.Logger, context: Optional[Dict[str, Any]] = None):
        self.context = dict(context or {})
        super().__init__(logger, self.context)

    def process(self, msg, kwargs):
        extra = dict(kwargs.get("extra") or {})
        extra["context"] = self.context
        kwargs["extra"] = extra
        return msg, kwargs

    @contextmanager
    def temp_context(self, **kwargs):
        """
        블록 안에서만 컨텍스트 추가

        Usage:
            with logger.temp_context(s=0.25, alice_sign="-"):
                logger.info("session started")
        """
        saved = self.context
        self.context = {**saved, **kwargs}
        try:
            yield self
        finally:
            self.context = saved


class StructuredLogger:
    """
    루트 로깅 설정과 로거 캐시 (싱글톤)

    LOG_LEVEL, LOG_FORMAT(text/json), LOG_FILE 을 읽습니다. pytest 아래에서는 WARNING 이상만 출력합니다.
    """

    _instance = None
    _loggers: Dict[str, ContextLogger] = {}

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, "initialized"):
            self.setup_logging()
            self.initialized = True

    def setup_logging(self):
        log_level = (get_optional_env("LOG_LEVEL", "INFO") or "INFO").upper()
        log_format = (get_optional_env("LOG_FORMAT", "text") or "text").lower()
        log_file = get_optional_env("LOG_FILE")

        level = logging.WARNING if "pytest" in sys.modules else getattr(logging, log_level, logging.INFO)
        formatter: logging.Formatter = (
            StructuredFormatter() if log_format == "json" else logging.Formatter(TEXT_FORMAT, "%Y-%m-%d %H:%M:%S")
        )

        root_logger = logging.getLogger()
        root_logger.setLevel(level)
        root_logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

        if log_file:
            file_handler = RotatingFileHandler(log_file, maxBytes=10 * 1024 * 1024, backupCount=5)
            file_handler.setFormatter(formatter)
            root_logger.addHandler(file_handler)

        logging.raiseExceptions = False

    def get_logger(self, name: str, context: Optional[Dict[str, Any]] = None) -> ContextLogger:
        if name not in self._loggers:
            self._loggers[name] = ContextLogger(logging.getLogger(name), context)
        return self._loggers[name]


# 글로벌 로깅 시스템 인스턴스
structured_logger = StructuredLogger()


def get_structured_logger(name: str, **context) -> ContextLogger:
    return structured_logger.get_logger(name, context=context)


def log_performance(logger: Optional[ContextLogger] = None):
    """
    함수 실행 시간을 로깅하는 데코레이터

    Usage:
        @log_performance()
        def sample_tables(...):
            ...
    """

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            log = logger or get_structured_logger(func.__module__)
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                log.error(
                    f"{func.__name__} failed",
                    extra={"extra_fields": _timing(func.__name__, start_time, "error", error=str(e))},
                )
                raise
            log.info(
                f"{func.__name__} completed",
                extra={"extra_fields": _timing(func.__name__, start_time, "success")},
            )
            return result

        return wrapper

    return decorator


def _timing(function: str, start_time: float, status: str, **fields: Any) -> Dict[str, Any]:
    duration_ms = (time.perf_counter() - start_time) * 1000
    return {"function": function, "duration_ms": round(duration_ms, 2), "status": status, **fields}
