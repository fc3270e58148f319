"""
SUSD 시뮬레이터 공통 설정 모듈

세션, 불완전성 모델, 광원/검출 통계, CLI 실행 설정을 pydantic 모델로 정의합니다.

사용 예:
    from src.config import RunConfig, SessionConfig

    # 기본 설정
    session = SessionConfig(s=0.25, trials=100_000)

    # JSON 설정 파일에서 (알 수 없는 키는 거부)
    run = RunConfig.from_file("configs/simulate.json")
"""

import hashlib
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.protocol.models import PortMapping
from src.utils.env_validator import get_optional_env
from src.utils.error_handler import ConfigurationError
from src.utils.random_streams import default_workers

# 7개 내적 값. 측정값 출처가 없는 예시 격자이므로 출력에 출처 레이블을 남김
DEFAULT_S_GRID: List[float] = [0.05, 0.10, 0.20, 0.30, 0.50, 0.70, 0.90]


def _env_seed() -> int:
    """SUSD_SEED 환경 변수 (기본 0)"""
    try:
        return int(get_optional_env("SUSD_SEED", "0") or "0")
    except ValueError as e:
        raise ConfigurationError(f"SUSD_SEED must be an integer: {e}", config_key="SUSD_SEED") from e


class AlicePolicy(str, Enum):
    """Alice 의 상태 선택 정책"""

    FIXED_PLUS = "+"
    FIXED_MINUS = "-"
    RANDOM = "random"


class SessionConfig(BaseModel):
    """Alice→Bob→Charlie 세션 설정"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    s: float = Field(..., ge=0.0, le=1.0, description="Alice 상태들의 내적")
    trials: int = Field(default=100_000, ge=1, description="시행 횟수")
    alice_policy: AlicePolicy = Field(default=AlicePolicy.RANDOM, description="Alice 상태 선택 정책")
    mapping: PortMapping = Field(default_factory=PortMapping.canonical, description="포트 매핑")
    seed: int = Field(default_factory=_env_seed, ge=0, description="난수 시드")
    randomize_mapping_per_trial: bool = Field(
        default=False, description="시행마다 포트 매핑을 균등 무작위로 다시 뽑을지 여부"
    )
    shards: int = Field(default=1, ge=1, description="(seed, shard) sub-stream 으로 나눌 샤드 수")


class ImperfectionConfig(BaseModel):
    """실험 불완전성 Monte Carlo 설정"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    hwp_jitter_max: float = Field(default=1.0, ge=0.0, le=45.0, description="HWP 각도 오차 최대값 (도)")
    pbs_loss_max: float = Field(default=0.03, ge=0.0, le=1.0, description="PBS 편광별 손실 최대 비율")
    mode_mismatch_max: float = Field(default=0.03, ge=0.0, le=1.0, description="간섭계 출력 모드 불일치 최대 비율")
    samples: int = Field(default=10_000, ge=1, description="Monte Carlo 샘플 수")
    sampling: Literal["uniform", "corners"] = Field(
        default="uniform", description="uniform: 범위 내 균등, corners: 각 파라미터를 경계값에서 선택"
    )
    statistic: Literal["minmax", "percentile"] = Field(
        default="minmax", description="엔벨로프 통계 (min/max 또는 2.5/97.5 백분위)"
    )

    @property
    def is_ideal(self) -> bool:
        return self.hwp_jitter_max == 0.0 and self.pbs_loss_max == 0.0 and self.mode_mismatch_max == 0.0


class SourceConfig(BaseModel):
    """헤럴드 단일광자 광원과 검출 파라미터"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    coincidence_rate: float = Field(default=2600.0, ge=0.0, description="동시 계수율 (1/s)")
    accidental_rate: float = Field(default=15.0, ge=0.0, description="우연 동시 계수율 (1/s)")
    detector_efficiency: float = Field(default=0.60, gt=0.0, le=1.0, description="APD 검출 효율")
    integration_time: float = Field(default=15.0, ge=0.0, description="런당 적분 시간 (s)")
    runs: int = Field(default=45, ge=1, description="실험 런 수")


class RunConfig(BaseModel):
    """
    CLI 실행 설정

    단일 JSON 문서로 읽으며 알 수 없는 키는 거부합니다.
    """

    model_config = ConfigDict(extra="forbid")

    s_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_S_GRID), description="내적 격자")
    s_grid_source: Literal["illustrative default", "user"] = Field(
        default="illustrative default", description="격자 출처 레이블"
    )
    alice_policy: AlicePolicy = Field(default=AlicePolicy.RANDOM)
    trials: int = Field(default=1_000_000, ge=1, description="격자 점당 시행 횟수")
    seed: int = Field(default_factory=_env_seed, ge=0, lt=2**64)
    workers: int = Field(
        default_factory=default_workers,
        ge=1,
        description="워커 프로세스 수 (결과에는 영향 없음)",
    )
    mapping: PortMapping = Field(default_factory=PortMapping.canonical)
    randomize_mapping_per_trial: bool = False
    imperfection: ImperfectionConfig = Field(default_factory=ImperfectionConfig)
    source: SourceConfig = Field(default_factory=SourceConfig)
    fault_injection: Dict[str, float] = Field(
        default_factory=dict, description="validate 명령용 플레이트 각도 오차 (플레이트 이름 → 도)"
    )
    output: Optional[str] = Field(default=None, description="출력 경로 (없으면 stdout)")
    format: Literal["csv", "json"] = Field(default="csv")

    @field_validator("s_grid")
    @classmethod
    def _check_grid(cls, grid: List[float]) -> List[float]:
        if not grid:
            raise ValueError("s_grid must not be empty")
        bad = [value for value in grid if not (0.0 <= value <= 1.0)]
        if bad:
            raise ValueError(f"s_grid values must lie in [0, 1], got {bad}")
        return grid

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        """
        JSON 설정 파일 로드

        Raises:
            ConfigurationError: 파일 없음, JSON 오류, 스키마 위반
        """
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigurationError(f"Config file not found: {path}", cause=e) from e
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Config file is not valid JSON: {path}: {e}", cause=e) from e
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """격자를 직접 지정했으면 출처 레이블은 user"""
        if isinstance(data, dict) and "s_grid" in data and "s_grid_source" not in data:
            data = {**data, "s_grid_source": "user"}
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid configuration: {e}", cause=e) from e

    def session_config(
        self, s: float, alice_policy: Optional[AlicePolicy] = None, seed: Optional[int] = None
    ) -> SessionConfig:
        """격자 점 하나에 대한 세션 설정"""
        return SessionConfig(
            s=s,
            trials=self.trials,
            alice_policy=alice_policy or self.alice_policy,
            mapping=self.mapping,
            seed=self.seed if seed is None else seed,
            randomize_mapping_per_trial=self.randomize_mapping_per_trial,
        )

    def canonical_json(self) -> str:
        """정렬된 키의 정규 JSON (재현용). 워커 수와 출력 위치는 결과에 영향이 없어 제외."""
        return json.dumps(
            self.model_dump(mode="json", exclude={"workers", "output"}),
            sort_keys=True,
            separators=(",", ":"),
        )

    def config_hash(self) -> str:
        """정규 JSON 의 SHA-256"""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()
