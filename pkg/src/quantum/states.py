"""
편광 큐빗 상태와 프로토콜 상태족

|h⟩, |v⟩ 기저 위의 2성분 복소 벡터로 편광 상태를 표현합니다.

- Alice 상태: |ψ±⟩ = a|h⟩ ± b|v⟩,  a² = (1+s)/2, b² = (1-s)/2
- 대각 상태: |±⟩ = (|h⟩ ± |v⟩)/√2
- 재준비 상태: |φ±⟩ = √((1-√s)/2)|h⟩ ∓ √((1+√s)/2)|v⟩

모든 prepare_* 함수는 c_h 를 실수, 비음수로 둡니다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.utils.error_handler import require_unit_interval

# 2×2 복소 연산자 (행: 출력 h,v / 열: 입력 h,v)
Operator2 = np.ndarray

STATE_TOLERANCE = 1e-10


class Sign(str, Enum):
    """Alice 가 고른 상태의 부호"""

    PLUS = "+"
    MINUS = "-"

    @property
    def factor(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0

    @property
    def opposite(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS


@dataclass(frozen=True)
class PolarizationState:
    """|h⟩, |v⟩ 성분을 갖는 편광 상태"""

    c_h: complex
    c_v: complex

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "PolarizationState":
        return cls(complex(vector[0]), complex(vector[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_h, self.c_v], dtype=complex)

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.c_h) ** 2 + abs(self.c_v) ** 2)

    def normalized(self) -> "PolarizationState":
        n = self.norm
        return PolarizationState(self.c_h / n, self.c_v / n)

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in (self.c_h.real, self.c_h.imag, self.c_v.real, self.c_v.imag))


@dataclass(frozen=True)
class OverlapParams:
    """내적 s 와 계수 a, b"""

    s: float
    a: float
    b: float


H = PolarizationState(1.0 + 0j, 0j)
V = PolarizationState(0j, 1.0 + 0j)
DIAG_PLUS = PolarizationState(1 / math.sqrt(2) + 0j, 1 / math.sqrt(2) + 0j)
DIAG_MINUS = PolarizationState(1 / math.sqrt(2) + 0j, -1 / math.sqrt(2) + 0j)


def diagonal(sign: Sign) -> PolarizationState:
    """|+⟩ 또는 |-⟩"""
    return DIAG_PLUS if Sign(sign) is Sign.PLUS else DIAG_MINUS


def coefficients_from_overlap(s: float) -> OverlapParams:
    """
    내적 s 로부터 Alice 상태의 계수 a, b 계산

    Raises:
        DomainError: s 가 [0, 1] 밖일 때
    """
    s = require_unit_interval("s", s)
    return OverlapParams(s=s, a=math.sqrt((1.0 + s) / 2.0), b=math.sqrt((1.0 - s) / 2.0))


def prepare_alice(s: float, sign: Sign) -> PolarizationState:
    """Alice 가 보내는 |ψ±⟩ = a|h⟩ ± b|v⟩"""
    params = coefficients_from_overlap(s)
    return PolarizationState(params.a + 0j, Sign(sign).factor * params.b + 0j)


def prepare_phi(s: float, sign: Sign) -> PolarizationState:
    """Charlie 에게 전달되는 |φ±⟩ = √((1-√s)/2)|h⟩ ∓ √((1+√s)/2)|v⟩"""
    s = require_unit_interval("s", s)
    root_s = math.sqrt(s)
    alpha = math.sqrt((1.0 - root_s) / 2.0)
    beta = math.sqrt((1.0 + root_s) / 2.0)
    return PolarizationState(alpha + 0j, -Sign(sign).factor * beta + 0j)


def overlap(u: PolarizationState, v: PolarizationState) -> complex:
    """내적 ⟨u|v⟩ (첫 인자에 대해 켤레 선형)"""
    return complex(np.vdot(u.vector, v.vector))


def fidelity(u: PolarizationState, v: PolarizationState) -> float:
    """|⟨u|v⟩|² (정규화된 상태 기준)"""
    return abs(overlap(u, v)) ** 2


def states_equal(u: PolarizationState, v: PolarizationState, tol: float = STATE_TOLERANCE) -> bool:
    """전역 위상을 무시한 상태 비교: |1 - |⟨u|v⟩|| ≤ tol"""
    return abs(1.0 - abs(overlap(u.normalized(), v.normalized()))) <= tol


def apply_operator(op: Operator2, state: PolarizationState) -> PolarizationState:
    """연산자를 상태에 적용 (정규화하지 않음)"""
    return PolarizationState.from_vector(np.asarray(op) @ state.vector)


def projector(state: PolarizationState) -> Operator2:
    """|u⟩⟨u|"""
    vec = state.vector
    return np.outer(vec, vec.conj())
