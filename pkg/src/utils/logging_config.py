"""
프로젝트 전체에서 사용되는 통합 로깅 설정 모듈

사용법:
    from src.utils.logging_config import get_logger

    logger = get_logger(__name__)
    logger.info("session started", extra={"extra_fields": {"s": 0.25, "trials": 10**6}})
"""

from src.utils.env_validator import get_optional_env
from src.utils.structured_logger import ContextLogger, get_structured_logger, log_performance

__all__ = ["get_logger", "log_performance"]


def get_logger(name: str) -> ContextLogger:
    """모듈 로거 (실행 환경과 서비스 이름이 컨텍스트에 포함됨)"""
    return get_structured_logger(name, environment=get_optional_env("ENV", "development"), service="susd")
