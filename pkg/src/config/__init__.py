"""
설정 관리 모듈

세션, 불완전성 모델, 광원, CLI 실행 설정을 중앙화하여 관리합니다.
"""

from .susd_config import (
    DEFAULT_S_GRID,
    AlicePolicy,
    ImperfectionConfig,
    RunConfig,
    SessionConfig,
    SourceConfig,
)

__all__ = [
    "DEFAULT_S_GRID",
    "AlicePolicy",
    "ImperfectionConfig",
    "RunConfig",
    "SessionConfig",
    "SourceConfig",
]
