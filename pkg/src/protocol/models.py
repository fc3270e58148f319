"""
SUSD 세션 데이터 모델

=== 모델 구조 ===
1. KLabel: 간섭계 출력 검출기 레이블 (+, -, i)
2. PortMapping: Bob 결과 → 간섭계 μ, (μ, Charlie 결과) → 검출기 k 의 전단사
3. TrialRecord: 시행 하나의 기록 (Alice 부호, Bob/Charlie 결과, 검출기)
4. SessionStats: 검출기별 카운트와 P_{μk}, P_succ 추정치

검출기 표는 (3, 3) 배열이며 행은 μ = 2, 3, 4, 열은 k = +, -, i 입니다.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations
from typing import Any, Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.quantum.measurements import OutcomeLabel
from src.quantum.states import Sign


class KLabel(str, Enum):
    """검출기 레이블"""

    PLUS = "+"
    MINUS = "-"
    INCONCLUSIVE = "i"


MU_VALUES: Tuple[int, ...] = (2, 3, 4)
K_VALUES: Tuple[KLabel, ...] = (KLabel.PLUS, KLabel.MINUS, KLabel.INCONCLUSIVE)
DETECTORS: Tuple[Tuple[int, KLabel], ...] = tuple((mu, k) for mu in MU_VALUES for k in K_VALUES)

# 재레이블링 순서 기준: Bob 은 (i, +, -) → μ, Charlie 는 (+, -, i) → k
BOB_OUTCOME_ORDER: Tuple[OutcomeLabel, ...] = (
    OutcomeLabel.INCONCLUSIVE,
    OutcomeLabel.CONCLUSIVE_PLUS,
    OutcomeLabel.CONCLUSIVE_MINUS,
)
CHARLIE_OUTCOME_ORDER: Tuple[OutcomeLabel, ...] = (
    OutcomeLabel.CONCLUSIVE_PLUS,
    OutcomeLabel.CONCLUSIVE_MINUS,
    OutcomeLabel.INCONCLUSIVE,
)
PERMUTATIONS: Tuple[Tuple[int, int, int], ...] = tuple(permutations(range(3)))


def detector_index(mu: int, k: KLabel) -> Tuple[int, int]:
    """(μ, k) → 표 인덱스 (행, 열)"""
    return MU_VALUES.index(mu), K_VALUES.index(KLabel(k))


class PortMapping(BaseModel):
    """Bob/Charlie 결과와 물리 경로/검출기의 대응"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bob: Dict[OutcomeLabel, int] = Field(
        default_factory=lambda: dict(zip(BOB_OUTCOME_ORDER, MU_VALUES)),
        description="Bob 결과 → 간섭계 인덱스 μ",
    )
    charlie: Dict[int, Dict[OutcomeLabel, KLabel]] = Field(
        default_factory=lambda: {mu: dict(zip(CHARLIE_OUTCOME_ORDER, K_VALUES)) for mu in MU_VALUES},
        description="간섭계 μ 별 Charlie 결과 → 검출기 k",
    )

    @model_validator(mode="after")
    def _check_bijective(self) -> "PortMapping":
        if set(self.bob) != set(BOB_OUTCOME_ORDER) or sorted(self.bob.values()) != list(MU_VALUES):
            raise ValueError(f"Bob mapping must be a bijection onto {MU_VALUES}, got {self.bob}")
        if set(self.charlie) != set(MU_VALUES):
            raise ValueError(f"Charlie mapping must cover interferometers {MU_VALUES}")
        for mu, table in self.charlie.items():
            if set(table) != set(CHARLIE_OUTCOME_ORDER) or set(table.values()) != set(K_VALUES):
                raise ValueError(f"Charlie mapping for interferometer {mu} is not a bijection: {table}")
        return self

    @classmethod
    def canonical(cls) -> "PortMapping":
        """μ=2 ← Bob 비결정, μ=3 ← Bob +, μ=4 ← Bob -; 각 간섭계에서 k = 결과"""
        return cls()

    @classmethod
    def from_permutations(cls, bob_perm: int, charlie_perms: Tuple[int, int, int]) -> "PortMapping":
        """PERMUTATIONS 인덱스로부터 매핑 생성 (0 은 항등)"""
        bob_order = PERMUTATIONS[bob_perm]
        bob = {outcome: MU_VALUES[bob_order[i]] for i, outcome in enumerate(BOB_OUTCOME_ORDER)}
        charlie = {}
        for mu, perm_index in zip(MU_VALUES, charlie_perms):
            order = PERMUTATIONS[perm_index]
            charlie[mu] = {outcome: K_VALUES[order[i]] for i, outcome in enumerate(CHARLIE_OUTCOME_ORDER)}
        return cls(bob=bob, charlie=charlie)

    def detector(self, bob_outcome: OutcomeLabel, charlie_outcome: OutcomeLabel) -> Tuple[int, KLabel]:
        """(Bob 결과, Charlie 결과) → 검출기 (μ, k)"""
        mu = self.bob[bob_outcome]
        return mu, self.charlie[mu][charlie_outcome]

    def cell(self, bob_outcome: OutcomeLabel, charlie_outcome: OutcomeLabel) -> Tuple[int, int]:
        """(Bob 결과, Charlie 결과) → 표 인덱스"""
        return detector_index(*self.detector(bob_outcome, charlie_outcome))

    def lookup_table(self) -> np.ndarray:
        """[bob_order_index, charlie_order_index] → 평탄화된 검출기 인덱스 (0..8)"""
        table = np.zeros((3, 3), dtype=np.int64)
        for i, bob_outcome in enumerate(BOB_OUTCOME_ORDER):
            for j, charlie_outcome in enumerate(CHARLIE_OUTCOME_ORDER):
                row, col = self.cell(bob_outcome, charlie_outcome)
                table[i, j] = 3 * row + col
        return table


@dataclass(frozen=True)
class TrialRecord:
    """시행 하나의 결과"""

    alice_sign: Sign
    bob_outcome: OutcomeLabel
    charlie_outcome: OutcomeLabel
    detector: Tuple[int, KLabel]

    @property
    def success(self) -> bool:
        """Bob 과 Charlie 모두 결정적이고 Alice 부호와 일치"""
        expected = OutcomeLabel.conclusive(self.alice_sign)
        return self.bob_outcome == expected and self.charlie_outcome == expected


def empty_table() -> np.ndarray:
    return np.zeros((3, 3), dtype=np.int64)


@dataclass
class SessionStats:
    """세션 집계 결과"""

    s: float
    trials: int
    counts: np.ndarray = field(default_factory=empty_table)
    counts_by_sign: Dict[Sign, np.ndarray] = field(
        default_factory=lambda: {Sign.PLUS: empty_table(), Sign.MINUS: empty_table()}
    )
    successes: int = 0
    successes_by_sign: Dict[Sign, int] = field(default_factory=lambda: {Sign.PLUS: 0, Sign.MINUS: 0})
    bob_conclusive: int = 0
    charlie_conclusive: int = 0
    conclusive_errors: int = 0

    @property
    def estimated_probs(self) -> np.ndarray:
        """P_{μk} 추정치"""
        return self.counts / self.trials

    @property
    def p_succ(self) -> float:
        """두 측정 모두 결정적이고 옳았던 시행의 비율"""
        return self.successes / self.trials

    def sign_totals(self) -> Dict[Sign, int]:
        return {sign: int(table.sum()) for sign, table in self.counts_by_sign.items()}

    def estimated_probs_for(self, sign: Sign) -> np.ndarray:
        """Alice 부호별 조건부 P_{μk} 추정치"""
        total = self.counts_by_sign[sign].sum()
        return self.counts_by_sign[sign] / total if total else np.zeros((3, 3))

    def merge(self, other: "SessionStats") -> "SessionStats":
        """샤드 결과 합산"""
        return SessionStats(
            s=self.s,
            trials=self.trials + other.trials,
            counts=self.counts + other.counts,
            counts_by_sign={sign: self.counts_by_sign[sign] + other.counts_by_sign[sign] for sign in Sign},
            successes=self.successes + other.successes,
            successes_by_sign={sign: self.successes_by_sign[sign] + other.successes_by_sign[sign] for sign in Sign},
            bob_conclusive=self.bob_conclusive + other.bob_conclusive,
            charlie_conclusive=self.charlie_conclusive + other.charlie_conclusive,
            conclusive_errors=self.conclusive_errors + other.conclusive_errors,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "trials": self.trials,
            "counts": self.counts.tolist(),
            "counts_by_sign": {sign.value: table.tolist() for sign, table in self.counts_by_sign.items()},
            "p_succ": self.p_succ,
            "bob_conclusive": self.bob_conclusive,
            "charlie_conclusive": self.charlie_conclusive,
            "conclusive_errors": self.conclusive_errors,
        }


def table_records(table: np.ndarray) -> List[Tuple[int, KLabel, float]]:
    """(3, 3) 표를 (μ, k, 값) 목록으로 평탄화"""
    return [(mu, k, float(table[detector_index(mu, k)])) for mu, k in DETECTORS]
