"""
Jones 계산 요소: 반파장판(HWP), 편광 빔 분할기(PBS), Sagnac 간섭계

HWP 규약: H(θ) = [[cos2θ, sin2θ], [sin2θ, -cos2θ]] (기저 h, v)

Sagnac 포트 규약:
    h 입력은 시계방향(cw) 팔의 HWP(θ_cw), v 입력은 반시계방향(ccw) 팔의 HWP(θ_ccw) 를 지납니다.
    재결합 시 두 팔의 cos 성분은 포트 b0, sin 성분은 포트 b1 로 나갑니다.

        b0 = L · diag(cos2θ_cw, -cos2θ_ccw) · L
        b1 = L · [[0, sin2θ_ccw], [sin2θ_cw, 0]] · L

    L = diag(√(1-loss_h), √(1-loss_v)) 는 PBS 통과 한 번의 진폭 감쇠입니다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from src.quantum.neumark import complete_isometry
from src.quantum.states import Operator2, PolarizationState, Sign, coefficients_from_overlap
from src.utils.error_handler import DomainError, require_unit_interval

READOUT_ANGLE = math.pi / 8


@dataclass(frozen=True)
class WavePlateSetting:
    """HWP 빠른 축 각도 (라디안, π 로 나눈 나머지)"""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise DomainError(f"Wave plate angle must be finite, got {self.theta!r}", parameter="theta", value=self.theta)
        object.__setattr__(self, "theta", self.theta % math.pi)

    def offset(self, degrees: float) -> "WavePlateSetting":
        """각도 오차(도)를 더한 설정"""
        return WavePlateSetting(self.theta + math.radians(degrees))

    def jones(self) -> Operator2:
        return hwp_jones(self.theta)


@dataclass(frozen=True)
class SagnacConfig:
    """Sagnac 간섭계 두 팔의 HWP 설정"""

    theta_cw: WavePlateSetting
    theta_ccw: WavePlateSetting

    @classmethod
    def from_angles(cls, theta_cw: float, theta_ccw: float) -> "SagnacConfig":
        return cls(WavePlateSetting(theta_cw), WavePlateSetting(theta_ccw))

    def perturbed(self, cw_degrees: float = 0.0, ccw_degrees: float = 0.0) -> "SagnacConfig":
        return SagnacConfig(self.theta_cw.offset(cw_degrees), self.theta_ccw.offset(ccw_degrees))


@dataclass(frozen=True)
class PBSParams:
    """PBS 편광별 손실 (투과 h, 반사 v 의 세기 손실 비율)"""

    loss_h: float = 0.0
    loss_v: float = 0.0

    def __post_init__(self):
        require_unit_interval("loss_h", self.loss_h)
        require_unit_interval("loss_v", self.loss_v)

    @property
    def is_ideal(self) -> bool:
        return self.loss_h == 0.0 and self.loss_v == 0.0

    def attenuation(self) -> Operator2:
        """L = diag(√(1-loss_h), √(1-loss_v))"""
        return np.diag([math.sqrt(1.0 - self.loss_h), math.sqrt(1.0 - self.loss_v)]).astype(complex)

    def transmitted(self) -> Operator2:
        """투과 경로 (h 만 통과)"""
        return np.diag([math.sqrt(1.0 - self.loss_h), 0.0]).astype(complex)

    def reflected(self) -> Operator2:
        """반사 경로 (v 만 통과)"""
        return np.diag([0.0, math.sqrt(1.0 - self.loss_v)]).astype(complex)


IDEAL_PBS = PBSParams()


def hwp_jones(theta: float) -> Operator2:
    """반파장판 Jones 행렬"""
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return np.array([[c, s], [s, -c]], dtype=complex)


def bob_sagnac_settings(s: float) -> SagnacConfig:
    """
    Bob 의 비최적 USD 를 구현하는 I1 각도

        θ_cw  = ½ arccos √((1-√s)/(1+s))
        θ_ccw = ½ arccos √(1/(1+√s)) + π/2
    """
    s = require_unit_interval("s", s)
    root_s = math.sqrt(s)
    theta_cw = 0.5 * math.acos(math.sqrt((1.0 - root_s) / (1.0 + s)))
    theta_ccw = 0.5 * math.acos(math.sqrt(1.0 / (1.0 + root_s))) + math.pi / 2.0
    return SagnacConfig.from_angles(theta_cw, theta_ccw)


def charlie_sagnac_settings(s: float) -> SagnacConfig:
    """Charlie 의 최적 USD 를 구현하는 I2-I4 각도 (θ_cw = 0, θ_ccw = ½ arccos √((1-√s)/(1+√s)))"""
    s = require_unit_interval("s", s)
    root_s = math.sqrt(s)
    return SagnacConfig.from_angles(0.0, 0.5 * math.acos(math.sqrt((1.0 - root_s) / (1.0 + root_s))))


def sagnac_ports(cfg: SagnacConfig, pbs: PBSParams = IDEAL_PBS) -> Tuple[Operator2, Operator2]:
    """포트 b0, b1 의 2×2 블록"""
    c_cw, s_cw = math.cos(2.0 * cfg.theta_cw.theta), math.sin(2.0 * cfg.theta_cw.theta)
    c_ccw, s_ccw = math.cos(2.0 * cfg.theta_ccw.theta), math.sin(2.0 * cfg.theta_ccw.theta)
    loss = pbs.attenuation()
    port_b0 = loss @ np.array([[c_cw, 0.0], [0.0, -c_ccw]], dtype=complex) @ loss
    port_b1 = loss @ np.array([[0.0, s_ccw], [s_cw, 0.0]], dtype=complex) @ loss
    return port_b0, port_b1


def sagnac_transfer(cfg: SagnacConfig, pbs: PBSParams = IDEAL_PBS) -> np.ndarray:
    """
    (포트 b0, b1) × (h, v) 위의 4×4 전달 행렬

    광자는 포트 b0 로 들어오며 (열 0, 1), 나머지 열은 이상적 네트워크의 유니터리 완성입니다.
    손실은 (I⊗L)·U·(I⊗L) 로 양쪽 PBS 통과에 적용됩니다.
    """
    ideal_b0, ideal_b1 = sagnac_ports(cfg)
    unitary = complete_isometry(np.vstack([ideal_b0, ideal_b1]), constrained=(0, 1))
    loss = np.kron(np.eye(2), pbs.attenuation())
    return loss @ unitary @ loss


def readout_split(theta: float, pbs: PBSParams = IDEAL_PBS) -> Tuple[Operator2, Operator2]:
    """판독 HWP + PBS: (투과 h 경로, 반사 v 경로) 블록"""
    plate = hwp_jones(theta)
    return pbs.transmitted() @ plate, pbs.reflected() @ plate


def alice_hwp_angle(s: float, sign: Sign) -> float:
    """HWP(θ)|h⟩ = |ψ±⟩ 가 되는 Alice 판 각도 ±½·atan2(b, a)"""
    params = coefficients_from_overlap(s)
    return Sign(sign).factor * 0.5 * math.atan2(params.b, params.a)


def alice_state_from_plate(theta: float) -> PolarizationState:
    """|h⟩ 광자가 Alice 판을 지난 상태"""
    return PolarizationState.from_vector(hwp_jones(theta)[:, 0])


def polarization_angle(state: PolarizationState) -> float:
    """실수 선형 편광 cos x|h⟩ + sin x|v⟩ 의 각도 x"""
    vec = state.normalized().vector
    phase = np.exp(-1j * np.angle(vec[0])) if abs(vec[0]) > 1e-12 else np.exp(-1j * np.angle(vec[1]))
    vec = vec * phase
    if np.max(np.abs(vec.imag)) > 1e-9:
        raise DomainError(f"State {state} is not linearly polarized", parameter="state", value=state)
    return math.atan2(float(vec[1].real), float(vec[0].real))


def reflection_angle(x: float, y: float) -> float:
    """각도 x 의 선형 편광을 각도 y 로 보내는 HWP 각도 (θ = (x+y)/2)"""
    return 0.5 * (x + y)


def reflection_angle_between(source: PolarizationState, target: PolarizationState) -> float:
    return reflection_angle(polarization_angle(source), polarization_angle(target))


@dataclass(frozen=True)
class PlateAngles:
    """s 에 대한 공칭 판 각도 모음 (라디안)"""

    s: float
    alice_plus: float
    alice_minus: float
    bob: SagnacConfig
    charlie: SagnacConfig
    rep_plus: float
    rep_minus: float
    readout: float = field(default=READOUT_ANGLE)


def nominal_plate_angles(s: float) -> PlateAngles:
    """재준비 판은 |h⟩→|φ+⟩, |v⟩→|φ-⟩ 반사로 선택"""
    s = require_unit_interval("s", s)
    root_s = math.sqrt(s)
    alpha = math.sqrt((1.0 - root_s) / 2.0)
    beta = math.sqrt((1.0 + root_s) / 2.0)
    return PlateAngles(
        s=s,
        alice_plus=alice_hwp_angle(s, Sign.PLUS),
        alice_minus=alice_hwp_angle(s, Sign.MINUS),
        bob=bob_sagnac_settings(s),
        charlie=charlie_sagnac_settings(s),
        rep_plus=reflection_angle(0.0, math.atan2(-beta, alpha)),
        rep_minus=reflection_angle(math.pi / 2.0, math.atan2(beta, alpha)),
    )
