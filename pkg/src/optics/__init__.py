"""
광학 배치 모델

HWP/PBS/Sagnac 간섭계의 Jones 계산과 전체 배치의 검출기 전달 사상을 제공합니다.
"""

from .jones import (
    PBSParams,
    SagnacConfig,
    WavePlateSetting,
    alice_hwp_angle,
    alice_state_from_plate,
    bob_sagnac_settings,
    charlie_sagnac_settings,
    hwp_jones,
    nominal_plate_angles,
    reflection_angle,
    sagnac_transfer,
)
from .setup import (
    PBS_NAMES,
    PLATE_NAMES,
    SetupTransfer,
    compile_setup,
    kraus_path_blocks,
    network_branches,
    transfer_to_kraus,
)

__all__ = [
    "PBS_NAMES",
    "PLATE_NAMES",
    "PBSParams",
    "SagnacConfig",
    "SetupTransfer",
    "WavePlateSetting",
    "alice_hwp_angle",
    "alice_state_from_plate",
    "bob_sagnac_settings",
    "charlie_sagnac_settings",
    "compile_setup",
    "hwp_jones",
    "kraus_path_blocks",
    "network_branches",
    "nominal_plate_angles",
    "reflection_angle",
    "sagnac_transfer",
    "transfer_to_kraus",
]
