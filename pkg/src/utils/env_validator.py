"""
환경 변수 로드 및 검증

.env / .env.local 을 읽고 시뮬레이터가 참조하는 변수(SUSD_SEED, SUSD_WORKERS, LOG_*)의 형식을 검사합니다.
모든 변수는 선택 사항이며, 형식이 잘못된 값은 경고만 남깁니다. 실제 파싱 오류는 사용하는 쪽
(설정 모듈, 워커 수 결정)이 처리합니다.
"""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional

from dotenv import load_dotenv

# structured_logger가 이 모듈을 임포트하므로 여기서는 표준 로거를 사용
logger = logging.getLogger(__name__)


def _is_int_in(low: int, high: Optional[int] = None) -> Callable[[str], bool]:
    def check(value: str) -> bool:
        try:
            number = int(value)
        except ValueError:
            return False
        return number >= low and (high is None or number < high)

    return check


@dataclass(frozen=True)
class EnvVarSpec:
    """환경 변수 명세"""
    name: str
    description: str
    default: Optional[str] = None
    validator: Optional[Callable[[str], bool]] = None


ENV_SPECS: Dict[str, EnvVarSpec] = {
    spec.name: spec
    for spec in (
        EnvVarSpec("SUSD_SEED", "Seed fallback when --seed is not given", "0", _is_int_in(0, 2**64)),
        EnvVarSpec("SUSD_WORKERS", "Default worker process count", "1", _is_int_in(1)),
        EnvVarSpec(
            "ENV",
            "Environment (development/production/test)",
            "development",
            lambda value: value in ("development", "production", "test"),
        ),
        EnvVarSpec(
            "LOG_LEVEL",
            "Logging level",
            "INFO",
            lambda value: value.upper() in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        ),
        EnvVarSpec("LOG_FORMAT", "Log output format (json/text)", "text", lambda value: value.lower() in ("json", "text")),
        EnvVarSpec("LOG_FILE", "Optional rotating log file path"),
    )
}


class EnvironmentValidator:
    """
    환경 변수 검증 및 관리 클래스

    애플리케이션 전체에서 하나의 인스턴스만 사용합니다 (Singleton).
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        if not hasattr(self, "initialized"):
            self.specs = ENV_SPECS
            self.initialized = True
            self._load_env_files()

    def _load_env_files(self):
        """환경 파일 로드 (.env, .env.local). 이미 설정된 변수는 덮어쓰지 않음."""
        for env_file in (".env", ".env.local"):
            if Path(env_file).exists():
                load_dotenv(env_file)
                logger.debug(f"Loaded environment from {env_file}")

    def validate(self) -> List[str]:
        """형식이 잘못된 변수마다 경고 메시지 하나"""
        warnings = []
        for name, spec in self.specs.items():
            value = os.getenv(name)
            if value and spec.validator and not spec.validator(value):
                warnings.append(f"Invalid {name}={value!r} ({spec.description})")
        for warning in warnings:
            logger.warning(warning)
        return warnings

    def get_optional_env(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """
        선택적 환경 변수 가져오기

        값이 비어 있으면 명세의 기본값, 그것도 없으면 default 를 돌려줍니다.
        """
        value = os.getenv(key)
        if value:
            return value
        spec = self.specs.get(key)
        if spec and spec.default is not None:
            return spec.default
        return default


# 글로벌 인스턴스 생성
env_validator = EnvironmentValidator()


def validate_environment() -> List[str]:
    """환경 변수 형식 검사 (경고 목록)"""
    return env_validator.validate()


def get_optional_env(key: str, default: Optional[str] = None) -> Optional[str]:
    """선택적 환경 변수 가져오기"""
    return env_validator.get_optional_env(key, default)
