"""
SUSD 프로토콜 모듈

세션 데이터 모델과 Alice→Bob→Charlie 실행 엔진을 제공합니다.
엔진은 설정 모듈에 의존하므로 `src.protocol.engine` 에서 직접 가져옵니다.
"""

from .models import (
    DETECTORS,
    K_VALUES,
    MU_VALUES,
    KLabel,
    PortMapping,
    SessionStats,
    TrialRecord,
    detector_index,
    table_records,
)

__all__ = [
    "DETECTORS",
    "K_VALUES",
    "MU_VALUES",
    "KLabel",
    "PortMapping",
    "SessionStats",
    "TrialRecord",
    "detector_index",
    "table_records",
]
