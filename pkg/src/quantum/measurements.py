"""
비최적/최적 USD 측정의 Kraus 표현

Bob 의 비최적 USD 와 Charlie 의 최적 USD 를 세 원소 Kraus 집합으로 구성하고,
확률 분포 계산과 시드 기반 확률적 적용을 제공합니다.

Kraus 원소 (행렬 행: 출력 h,v / 열: 입력 h,v):

    Bob      A_0 = diag(√((1-√s)/(1+s)), √(1/(1+√s)))
             A_i = [[0, -√(√s/(1+√s))], [√((√s+s)/(1+s)), 0]]
    Charlie  C_0 = diag(1, -√((1-√s)/(1+√s)))
             C_i = [[0, √(2√s/(1+√s))], [0, 0]]

결정적(conclusive) 원소는 A_± = |±⟩⟨±| A_0 로 나뉩니다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.quantum.states import (
    DIAG_MINUS,
    DIAG_PLUS,
    H,
    Operator2,
    PolarizationState,
    Sign,
    overlap,
    projector,
)
from src.utils.error_handler import ContractError, NumericalError, require_unit_interval

COMPLETENESS_TOLERANCE = 1e-12
MIN_TOTAL_PROBABILITY = 1e-15


class OutcomeLabel(str, Enum):
    """측정 결과 레이블"""

    CONCLUSIVE_PLUS = "conclusive_plus"
    CONCLUSIVE_MINUS = "conclusive_minus"
    INCONCLUSIVE = "inconclusive"

    @property
    def is_conclusive(self) -> bool:
        return self is not OutcomeLabel.INCONCLUSIVE

    @property
    def sign(self) -> Optional[Sign]:
        """결정적 결과가 가리키는 Alice 부호"""
        return {
            OutcomeLabel.CONCLUSIVE_PLUS: Sign.PLUS,
            OutcomeLabel.CONCLUSIVE_MINUS: Sign.MINUS,
        }.get(self)

    @classmethod
    def conclusive(cls, sign: Sign) -> "OutcomeLabel":
        return cls.CONCLUSIVE_PLUS if Sign(sign) is Sign.PLUS else cls.CONCLUSIVE_MINUS


# 역 CDF 샘플링 순서 (+, -, i)
OUTCOME_ORDER: Tuple[OutcomeLabel, ...] = (
    OutcomeLabel.CONCLUSIVE_PLUS,
    OutcomeLabel.CONCLUSIVE_MINUS,
    OutcomeLabel.INCONCLUSIVE,
)


@dataclass(frozen=True)
class KrausSet:
    """레이블이 붙은 2×2 Kraus 연산자 집합"""

    elements: Tuple[Tuple[OutcomeLabel, Operator2], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.elements]
        if len(set(labels)) != len(labels):
            raise ContractError(f"Kraus labels must be unique, got {labels}")

    @classmethod
    def from_mapping(cls, operators: Dict[OutcomeLabel, Operator2]) -> "KrausSet":
        """OUTCOME_ORDER 순서로 정렬된 집합 생성"""
        ordered = [(label, np.asarray(operators[label], dtype=complex)) for label in OUTCOME_ORDER if label in operators]
        extra = [(label, np.asarray(op, dtype=complex)) for label, op in operators.items() if label not in OUTCOME_ORDER]
        return cls(tuple(ordered + extra))

    @property
    def labels(self) -> List[OutcomeLabel]:
        return [label for label, _ in self.elements]

    def __iter__(self) -> Iterator[Tuple[OutcomeLabel, Operator2]]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def operator(self, label: OutcomeLabel) -> Operator2:
        for element_label, op in self.elements:
            if element_label == label:
                return op
        raise KeyError(label)


@dataclass(frozen=True)
class MeasurementResult:
    """측정 한 번의 결과"""

    label: OutcomeLabel
    post_state: PolarizationState
    probability: float


def _bob_branch_operators(s: float) -> Tuple[Operator2, Operator2]:
    """Bob 의 결정적 분기 A_0 와 비결정적 분기 A_i"""
    root_s = math.sqrt(s)
    a0 = np.diag([math.sqrt((1.0 - root_s) / (1.0 + s)), math.sqrt(1.0 / (1.0 + root_s))]).astype(complex)
    ai = np.array(
        [
            [0.0, -math.sqrt(root_s / (1.0 + root_s))],
            [math.sqrt((root_s + s) / (1.0 + s)), 0.0],
        ],
        dtype=complex,
    )
    return a0, ai


def _charlie_branch_operators(s: float) -> Tuple[Operator2, Operator2]:
    """Charlie 의 결정적 분기 C_0 와 비결정적 분기 C_i"""
    root_s = math.sqrt(s)
    c0 = np.diag([1.0, -math.sqrt((1.0 - root_s) / (1.0 + root_s))]).astype(complex)
    ci = np.array([[0.0, math.sqrt(2.0 * root_s / (1.0 + root_s))], [0.0, 0.0]], dtype=complex)
    return c0, ci


def _split_conclusive(branch: Operator2, inconclusive: Operator2) -> KrausSet:
    """결정적 분기를 |±⟩ 기저로 나눠 세 원소 집합 구성"""
    return KrausSet.from_mapping(
        {
            OutcomeLabel.CONCLUSIVE_PLUS: projector(DIAG_PLUS) @ branch,
            OutcomeLabel.CONCLUSIVE_MINUS: projector(DIAG_MINUS) @ branch,
            OutcomeLabel.INCONCLUSIVE: inconclusive,
        }
    )


def bob_usd(s: float) -> KrausSet:
    """
    Bob 의 비최적 USD

    |ψ±⟩ 에 대해 결정적 결과 확률 1-√s, 비결정적 결과 확률 √s 이며
    비결정적 사후 상태는 ∓|φ±⟩ 입니다.
    """
    s = require_unit_interval("s", s)
    return _split_conclusive(*_bob_branch_operators(s))


def charlie_usd(s: float) -> KrausSet:
    """
    Charlie 의 최적 USD (|φ±⟩ 판별)

    실패 확률은 √s = |⟨φ-|φ+⟩| 이고 실패 시 사후 상태는 입력과 무관하게 |h⟩ 입니다.
    """
    s = require_unit_interval("s", s)
    return _split_conclusive(*_charlie_branch_operators(s))


def optimal_usd(
    pair_overlap: float,
    basis_pair: Sequence[PolarizationState],
    conclusive_basis: Sequence[PolarizationState] = (DIAG_PLUS, DIAG_MINUS),
    failure_state: PolarizationState = H,
    tol: float = 1e-10,
) -> KrausSet:
    """
    두 순수 상태에 대한 일반 최적(IDP) USD

    u_1 → √(1-o)|e_1⟩, u_2 → √(1-o)|e_2⟩ 로 보내는 결정적 분기와
    u_1 → √o|w⟩, u_2 → √o·(g/o)|w⟩ 로 보내는 실패 분기를 구성합니다
    (g = ⟨u_1|u_2⟩, o = |g|). 두 분기를 합친 사상은 내적을 보존하므로 완전성이 성립합니다.

    Args:
        pair_overlap: |⟨u_1|u_2⟩|
        basis_pair: 판별할 두 상태 (u_1 → conclusive_plus, u_2 → conclusive_minus)
        conclusive_basis: 결정적 결과의 직교 판독 기저 (e_1, e_2)
        failure_state: 실패 시 사후 상태 w
        tol: pair_overlap 일치 허용 오차

    Raises:
        ContractError: pair_overlap 이 실제 내적 크기와 다를 때
    """
    pair_overlap = require_unit_interval("pair_overlap", pair_overlap)
    u1, u2 = (state.normalized() for state in basis_pair)
    g = overlap(u1, u2)
    if abs(abs(g) - pair_overlap) > tol:
        raise ContractError(
            f"pair_overlap={pair_overlap!r} does not match |<u1|u2>|={abs(g)!r}"
        )

    e1, e2 = conclusive_basis
    w = failure_state.normalized().vector

    if pair_overlap >= 1.0 - tol:
        # 구별 불가능: 실패 분기가 u_1 → w 로 보내는 유니터리
        u1_perp = np.array([-np.conj(u1.c_v), np.conj(u1.c_h)])
        w_perp = np.array([-np.conj(w[1]), np.conj(w[0])])
        failure = np.outer(w, u1.vector.conj()) + np.outer(w_perp, u1_perp.conj())
        zero = np.zeros((2, 2), dtype=complex)
        return KrausSet.from_mapping(
            {
                OutcomeLabel.CONCLUSIVE_PLUS: zero,
                OutcomeLabel.CONCLUSIVE_MINUS: zero.copy(),
                OutcomeLabel.INCONCLUSIVE: failure,
            }
        )

    inputs_inv = np.linalg.inv(np.column_stack([u1.vector, u2.vector]))
    success = math.sqrt(1.0 - pair_overlap) * np.column_stack([e1.vector, e2.vector]) @ inputs_inv
    if pair_overlap <= tol:
        failure = np.zeros((2, 2), dtype=complex)
    else:
        row = np.array([1.0, g / pair_overlap], dtype=complex)
        failure = math.sqrt(pair_overlap) * np.outer(w, row) @ inputs_inv

    return KrausSet.from_mapping(
        {
            OutcomeLabel.CONCLUSIVE_PLUS: projector(e1) @ success,
            OutcomeLabel.CONCLUSIVE_MINUS: projector(e2) @ success,
            OutcomeLabel.INCONCLUSIVE: failure,
        }
    )


def povm_elements(m: KrausSet) -> Dict[OutcomeLabel, Operator2]:
    """Π_m = A_m† A_m"""
    return {label: op.conj().T @ op for label, op in m}


def verify_completeness(m: KrausSet) -> float:
    """Σ A†A 와 단위 행렬의 최대 성분 편차"""
    total = sum((op.conj().T @ op for _, op in m), np.zeros((2, 2), dtype=complex))
    return float(np.max(np.abs(total - np.eye(2))))


def outcome_distribution(m: KrausSet, state: PolarizationState) -> List[Tuple[OutcomeLabel, float]]:
    """각 결과의 확률 ‖A_m|in⟩‖² (Kraus 집합 순서)"""
    vec = state.vector
    return [(label, float(np.real(np.vdot(op @ vec, op @ vec)))) for label, op in m]


def apply(m: KrausSet, state: PolarizationState, rng: np.random.Generator) -> MeasurementResult:
    """
    Kraus 측정을 확률적으로 적용

    균등 난수 하나를 소비해 (+, -, i) 순서의 역 CDF 로 결과를 고르고,
    사후 상태 A_m|in⟩/‖A_m|in⟩‖ 를 돌려줍니다.

    Raises:
        NumericalError: 모든 결과 확률이 1e-15 미만일 때
    """
    return apply_with_uniform(m, state, float(rng.random()))


def apply_with_uniform(m: KrausSet, state: PolarizationState, u: float) -> MeasurementResult:
    """균등 난수 u ∈ [0, 1) 를 직접 받아 측정을 적용"""
    distribution = outcome_distribution(m, state)
    probabilities = np.array([p for _, p in distribution])
    if np.all(probabilities < MIN_TOTAL_PROBABILITY):
        raise NumericalError(
            f"All outcome probabilities are below {MIN_TOTAL_PROBABILITY} for input {state}"
        )

    # 수치 잡음 수준의 확률은 샘플링에서 제외
    index = sample_index(np.where(probabilities < MIN_TOTAL_PROBABILITY, 0.0, probabilities), u)
    label, op = m.elements[index]
    post = PolarizationState.from_vector(op @ state.vector).normalized()
    return MeasurementResult(label=label, post_state=post, probability=float(probabilities[index]))


def sample_index(probabilities: np.ndarray, u: float) -> int:
    """역 CDF 샘플링. 확률 0 인 결과는 선택되지 않음."""
    cumulative = np.cumsum(probabilities)
    cumulative = cumulative / cumulative[-1]
    index = int(np.searchsorted(cumulative, u, side="right"))
    index = min(index, len(probabilities) - 1)
    while probabilities[index] <= 0.0 and index > 0:
        index -= 1
    return index
