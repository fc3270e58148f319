"""
Neumark 확장 (시스템 ⊗ 경로 보조계)

Kraus 집합을 두 개의 보조계 분기로 묶어 4×4 유니터리로 확장합니다.

- 결정적 결과(conclusive_±)는 b0 분기를 공유하고, 이후 직교 판독 기저로 나뉩니다.
- 비결정적 결과는 b1 분기입니다.
- 기저 순서: (h⊗b0, v⊗b0, h⊗b1, v⊗b1), 인덱스 = 2·branch + pol.
- 초기 보조계 상태 |B⟩ 는 b0 (initial_ancilla=0).

행렬 원소 관계 ⟨k|A_m|j⟩ = ⟨k|⟨b_m|U|j⟩|B⟩ 로 분기 연산자를 다시 읽을 수 있습니다.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.quantum.measurements import KrausSet, OutcomeLabel, verify_completeness
from src.quantum.states import DIAG_MINUS, DIAG_PLUS, Operator2
from src.utils.error_handler import ContractError, DimensionError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

GROUPING_TOLERANCE = 1e-10
GRAM_SCHMIDT_CUTOFF = 1e-10


@dataclass(frozen=True)
class NeumarkUnitary:
    """4×4 확장 유니터리와 판독 정보"""

    matrix: np.ndarray
    initial_ancilla: int = 0
    readout_basis: Optional[np.ndarray] = None  # 열: conclusive_plus, conclusive_minus 판독 벡터

    def unitarity_deviation(self) -> float:
        """‖U†U - I‖_max"""
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(4))))

    def act(self, system: np.ndarray) -> np.ndarray:
        """U (|j⟩ ⊗ |B⟩)"""
        joint = np.zeros(4, dtype=complex)
        joint[2 * self.initial_ancilla: 2 * self.initial_ancilla + 2] = system
        return self.matrix @ joint


def _range_vector(op: Operator2) -> Optional[np.ndarray]:
    """rank-1 연산자의 치역 벡터 (0 이면 None)"""
    if np.max(np.abs(op)) <= GROUPING_TOLERANCE:
        return None
    left, singular, _ = np.linalg.svd(op)
    if singular[1] > GROUPING_TOLERANCE:
        raise DimensionError("Conclusive Kraus elements must have rank at most 1 to share one ancilla branch")
    return left[:, 0]


def _readout_basis(plus: Operator2, minus: Operator2) -> np.ndarray:
    """결정적 원소들의 치역으로부터 직교 판독 기저 결정"""
    r_plus = _range_vector(plus)
    r_minus = _range_vector(minus)

    if r_plus is None and r_minus is None:
        return np.column_stack([DIAG_PLUS.vector, DIAG_MINUS.vector])
    if r_plus is None:
        r_plus = np.array([-np.conj(r_minus[1]), np.conj(r_minus[0])])
    if r_minus is None:
        r_minus = np.array([-np.conj(r_plus[1]), np.conj(r_plus[0])])

    if abs(np.vdot(r_plus, r_minus)) > GROUPING_TOLERANCE:
        raise DimensionError(
            "Conclusive Kraus elements have non-orthogonal ranges; "
            "they cannot be separated by a projective readout of one ancilla branch"
        )
    return np.column_stack([r_plus, r_minus])


def _complete_unitary(columns: np.ndarray, constrained: Tuple[int, ...]) -> np.ndarray:
    """
    제약된 열을 정준 기저 벡터에 대한 Gram-Schmidt 로 완전한 유니터리로 확장

    정준 벡터 e_0..e_3 를 인덱스 순서로 시도하고 잔여 노름이 작은 것은 건너뜁니다.
    """
    dim = columns.shape[0]
    basis = [columns[:, k] for k in range(columns.shape[1])]
    for k in range(dim):
        candidate = np.zeros(dim, dtype=complex)
        candidate[k] = 1.0
        for _ in range(2):
            for vec in basis:
                candidate = candidate - np.vdot(vec, candidate) * vec
        norm = np.linalg.norm(candidate)
        if norm > GRAM_SCHMIDT_CUTOFF:
            basis.append(candidate / norm)
        if len(basis) == dim:
            break

    free_columns = [k for k in range(dim) if k not in constrained]
    unitary = np.zeros((dim, dim), dtype=complex)
    for position, k in enumerate(constrained):
        unitary[:, k] = basis[position]
    for offset, k in enumerate(free_columns):
        unitary[:, k] = basis[len(constrained) + offset]
    return unitary


def complete_isometry(columns: np.ndarray, constrained: Tuple[int, ...]) -> np.ndarray:
    """4×2 등거리 사상을 지정된 열 위치에 두고 나머지를 채운 4×4 유니터리"""
    return _complete_unitary(np.asarray(columns, dtype=complex), constrained)


def neumark_dilation(m: KrausSet, tol: float = 1e-10) -> NeumarkUnitary:
    """
    Kraus 집합의 2-branch Neumark 확장

    Raises:
        DimensionError: 두 분기로 묶을 수 없는 Kraus 집합
        ContractError: 완전성이 깨진 집합
    """
    labels = set(m.labels)
    allowed = {OutcomeLabel.CONCLUSIVE_PLUS, OutcomeLabel.CONCLUSIVE_MINUS, OutcomeLabel.INCONCLUSIVE}
    if not labels <= allowed:
        raise DimensionError(f"Unsupported outcome labels for a two-branch dilation: {sorted(labels - allowed)}")

    deviation = verify_completeness(m)
    if deviation > tol:
        raise ContractError(f"Kraus set is not complete (deviation {deviation:.3e})")

    zero = np.zeros((2, 2), dtype=complex)
    plus = m.operator(OutcomeLabel.CONCLUSIVE_PLUS) if OutcomeLabel.CONCLUSIVE_PLUS in labels else zero
    minus = m.operator(OutcomeLabel.CONCLUSIVE_MINUS) if OutcomeLabel.CONCLUSIVE_MINUS in labels else zero
    failure = m.operator(OutcomeLabel.INCONCLUSIVE) if OutcomeLabel.INCONCLUSIVE in labels else zero

    readout = _readout_basis(plus, minus)
    branch0 = plus + minus

    columns = np.vstack([branch0, failure])
    unitary = complete_isometry(columns, constrained=(0, 1))
    dilation = NeumarkUnitary(matrix=unitary, initial_ancilla=0, readout_basis=readout)

    logger.debug(f"Neumark dilation built, unitarity deviation {dilation.unitarity_deviation():.3e}")
    return dilation


def kraus_from_dilation(dilation: NeumarkUnitary, branch: int) -> Operator2:
    """⟨k|A_m|j⟩ = ⟨k|⟨b_m|U|j⟩|B⟩ 로 분기 연산자 추출"""
    start = 2 * dilation.initial_ancilla
    return dilation.matrix[2 * branch: 2 * branch + 2, start: start + 2].copy()


def kraus_set_from_dilation(dilation: NeumarkUnitary) -> KrausSet:
    """확장에서 세 원소 Kraus 집합을 복원 (b0 분기를 판독 기저로 분할)"""
    branch0 = kraus_from_dilation(dilation, 0)
    readout = dilation.readout_basis
    r_plus, r_minus = readout[:, 0], readout[:, 1]
    return KrausSet.from_mapping(
        {
            OutcomeLabel.CONCLUSIVE_PLUS: np.outer(r_plus, r_plus.conj()) @ branch0,
            OutcomeLabel.CONCLUSIVE_MINUS: np.outer(r_minus, r_minus.conj()) @ branch0,
            OutcomeLabel.INCONCLUSIVE: kraus_from_dilation(dilation, 1),
        }
    )
