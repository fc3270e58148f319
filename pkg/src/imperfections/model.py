"""
실험 불완전성 모델

HWP 각도 오차, PBS 편광별 손실, Sagnac 출력 모드 불일치를 무작위로 뽑아
불완전한 배치 하나(PerturbedSetup)를 만들고, 그 배치의 검출 확률을 계산합니다.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from src.config.susd_config import ImperfectionConfig
from src.optics.jones import IDEAL_PBS, PBSParams, alice_hwp_angle, alice_state_from_plate
from src.optics.setup import (
    INTERFEROMETERS,
    PBS_NAMES,
    PLATE_NAMES,
    branch_detector_probs,
    network_branches,
)
from src.protocol.models import PortMapping
from src.quantum.states import Sign
from src.utils.error_handler import DegenerateSetupError

MIN_THROUGHPUT = 1e-9


@dataclass(frozen=True)
class PerturbedSetup:
    """불완전한 배치 하나 (각도 오차는 도 단위)"""

    hwp_offsets: Dict[str, float] = field(default_factory=lambda: {name: 0.0 for name in PLATE_NAMES})
    pbs_losses: Dict[str, PBSParams] = field(default_factory=lambda: {name: IDEAL_PBS for name in PBS_NAMES})
    mode_mismatch: Dict[str, float] = field(default_factory=lambda: {name: 0.0 for name in INTERFEROMETERS})

    @classmethod
    def ideal(cls) -> "PerturbedSetup":
        return cls()

    @property
    def is_ideal(self) -> bool:
        return (
            all(value == 0.0 for value in self.hwp_offsets.values())
            and all(pbs.is_ideal for pbs in self.pbs_losses.values())
            and all(value == 0.0 for value in self.mode_mismatch.values())
        )

    def within(self, cfg: ImperfectionConfig) -> bool:
        """모든 값이 설정된 범위 안에 있는지"""
        return (
            all(abs(value) <= cfg.hwp_jitter_max for value in self.hwp_offsets.values())
            and all(
                0.0 <= pbs.loss_h <= cfg.pbs_loss_max and 0.0 <= pbs.loss_v <= cfg.pbs_loss_max
                for pbs in self.pbs_losses.values()
            )
            and all(0.0 <= value <= cfg.mode_mismatch_max for value in self.mode_mismatch.values())
        )


def _unit_draws(rng: np.random.Generator, size, symmetric: bool, corners: bool) -> np.ndarray:
    """[0,1] (또는 대칭 [-1,1]) 범위의 배율 값"""
    if corners:
        bits = rng.integers(0, 2, size=size).astype(float)
        return 2.0 * bits - 1.0 if symmetric else bits
    return rng.uniform(-1.0, 1.0, size=size) if symmetric else rng.uniform(0.0, 1.0, size=size)


def sample_imperfection(cfg: ImperfectionConfig, rng: np.random.Generator) -> PerturbedSetup:
    """
    불완전성 한 번 추출

    uniform: 각도 오차 U[-max, max], PBS 손실 U[0, max] (h, v 독립), 모드 불일치 U[0, max]
    corners: 각 파라미터를 범위의 경계값 중 하나로 선택
    최대값이 0 인 파라미터는 정확히 0 이 됩니다.
    """
    corners = cfg.sampling == "corners"
    offsets = _unit_draws(rng, len(PLATE_NAMES), symmetric=True, corners=corners) * cfg.hwp_jitter_max
    losses = _unit_draws(rng, (len(PBS_NAMES), 2), symmetric=False, corners=corners) * cfg.pbs_loss_max
    mismatch = _unit_draws(rng, len(INTERFEROMETERS), symmetric=False, corners=corners) * cfg.mode_mismatch_max

    return PerturbedSetup(
        hwp_offsets={name: float(value) + 0.0 for name, value in zip(PLATE_NAMES, offsets)},  # -0.0 → 0.0
        pbs_losses={
            name: PBSParams(loss_h=float(pair[0]), loss_v=float(pair[1])) for name, pair in zip(PBS_NAMES, losses)
        },
        mode_mismatch={name: float(value) for name, value in zip(INTERFEROMETERS, mismatch)},
    )


def alice_state(s: float, sign: Sign, offset_degrees: float = 0.0):
    """각도 오차가 있는 Alice 판으로 준비한 상태"""
    return alice_state_from_plate(alice_hwp_angle(s, sign) + math.radians(offset_degrees))


def perturbed_detector_probs(
    s: float,
    alice_sign: Sign,
    p: PerturbedSetup,
    mapping: Optional[PortMapping] = None,
) -> Tuple[np.ndarray, float]:
    """
    불완전한 배치의 (검출 사건으로 재정규화한 P_{μk} 표, 처리량)

    Raises:
        DegenerateSetupError: 처리량이 1e-9 미만
    """
    tables, throughputs = perturbed_tables(s, (Sign(alice_sign),), p, mapping)
    return tables[0], throughputs[0]


def perturbed_tables(
    s: float,
    signs: Tuple[Sign, ...],
    p: PerturbedSetup,
    mapping: Optional[PortMapping] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """여러 Alice 부호에 대해 배치를 한 번만 구성하여 평가"""
    branches = network_branches(s, mapping, p.pbs_losses, p.hwp_offsets, p.mode_mismatch)
    tables = np.zeros((len(signs), 3, 3))
    throughputs = np.zeros(len(signs))
    for index, sign in enumerate(signs):
        raw = branch_detector_probs(branches, alice_state(s, sign, p.hwp_offsets.get("alice", 0.0)))
        throughput = float(raw.sum())
        if throughput < MIN_THROUGHPUT:
            raise DegenerateSetupError(
                f"Optical throughput {throughput:.3e} is below {MIN_THROUGHPUT} at s={s}",
                throughput=throughput,
            )
        tables[index] = raw / throughput
        throughputs[index] = throughput
    return tables, throughputs
