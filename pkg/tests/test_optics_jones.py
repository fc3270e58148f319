"""
Jones 계산 요소 테스트

HWP 행렬, Sagnac 간섭계 각도 공식, 4×4 전달 행렬, 판 각도 선택을 검증합니다.
"""
import math
import os
import sys

import numpy as np
import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.optics.jones import (
    PBSParams,
    SagnacConfig,
    WavePlateSetting,
    alice_hwp_angle,
    alice_state_from_plate,
    bob_sagnac_settings,
    charlie_sagnac_settings,
    hwp_jones,
    nominal_plate_angles,
    polarization_angle,
    readout_split,
    reflection_angle_between,
    sagnac_transfer,
)
from src.optics.setup import phase_aligned_distance, transfer_to_kraus
from src.quantum.measurements import OutcomeLabel, bob_usd
from src.quantum.states import DIAG_MINUS, DIAG_PLUS, H, V, Sign, prepare_alice, prepare_phi, states_equal
from src.utils.error_handler import DomainError


class TestHalfWavePlate:
    """HWP Jones 행렬"""

    def test_zero_angle(self):
        assert np.allclose(hwp_jones(0.0), np.diag([1.0, -1.0]))

    def test_quarter_pi_swaps(self):
        assert np.allclose(hwp_jones(math.pi / 4), [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)

    def test_eighth_pi_to_diagonal(self):
        out = hwp_jones(math.pi / 8) @ H.vector
        assert np.allclose(out, DIAG_PLUS.vector, atol=1e-15)

    def test_setting_reduced_mod_pi(self):
        assert WavePlateSetting(math.pi + 0.1).theta == pytest.approx(0.1)
        assert WavePlateSetting(0.2).offset(1.0).theta == pytest.approx(0.2 + math.radians(1.0))

    def test_non_finite_angle(self):
        with pytest.raises(DomainError):
            WavePlateSetting(float("inf"))


class TestSagnacAngles:
    """간섭계 각도 공식"""

    def test_bob_orthogonal(self):
        cfg = bob_sagnac_settings(0.0)
        assert cfg.theta_cw.theta == pytest.approx(0.0, abs=1e-15)
        assert cfg.theta_ccw.theta == pytest.approx(math.pi / 2)

    def test_bob_quarter(self):
        cfg = bob_sagnac_settings(0.25)
        assert cfg.theta_cw.theta == pytest.approx(0.44304, abs=1e-5)
        assert cfg.theta_ccw.theta == pytest.approx(1.87854, abs=1e-5)

    def test_bob_identical(self):
        assert bob_sagnac_settings(1.0).theta_cw.theta == pytest.approx(math.pi / 4)

    def test_charlie(self):
        assert charlie_sagnac_settings(0.0).theta_ccw.theta == pytest.approx(0.0, abs=1e-15)
        assert charlie_sagnac_settings(0.25).theta_ccw.theta == pytest.approx(0.47766, abs=1e-5)
        assert charlie_sagnac_settings(1.0).theta_ccw.theta == pytest.approx(math.pi / 4)
        assert charlie_sagnac_settings(0.6).theta_cw.theta == 0.0

    def test_domain(self):
        with pytest.raises(DomainError):
            charlie_sagnac_settings(2.0)


class TestSagnacTransfer:
    """4×4 간섭계 전달 행렬"""

    def test_orthogonal_discrimination(self):
        """(0, π/2) 설정에서 |ψ±⟩ 는 포트 b0 로 |±⟩ 가 되어 나감"""
        transfer = sagnac_transfer(SagnacConfig.from_angles(0.0, math.pi / 2))
        for sign, target in ((Sign.PLUS, DIAG_PLUS), (Sign.MINUS, DIAG_MINUS)):
            joint = transfer[:, :2] @ prepare_alice(0.0, sign).vector
            assert np.linalg.norm(joint[2:]) < 1e-12
            assert abs(abs(np.vdot(target.vector, joint[:2])) - 1.0) < 1e-12

    def test_unitary_when_ideal(self, random_s):
        for s in random_s:
            transfer = sagnac_transfer(bob_sagnac_settings(s))
            assert np.max(np.abs(transfer.conj().T @ transfer - np.eye(4))) < 1e-12

    def test_ports_match_bob_kraus(self, random_s):
        for s in random_s:
            transfer = sagnac_transfer(bob_sagnac_settings(s))
            kraus = bob_usd(s)
            conclusive = kraus.operator(OutcomeLabel.CONCLUSIVE_PLUS) + kraus.operator(OutcomeLabel.CONCLUSIVE_MINUS)
            assert phase_aligned_distance(transfer_to_kraus(transfer, "b0"), conclusive) < 1e-10
            assert phase_aligned_distance(transfer_to_kraus(transfer, "b1"), kraus.operator(OutcomeLabel.INCONCLUSIVE)) < 1e-10

    def test_amplitude_pattern(self, random_s):
        """결정적 포트 진폭 √(1-√s), 비결정적 포트 진폭 s^{1/4}"""
        for s in random_s:
            joint = sagnac_transfer(bob_sagnac_settings(s))[:, :2] @ prepare_alice(s, Sign.PLUS).vector
            assert abs(np.linalg.norm(joint[:2]) - math.sqrt(1 - math.sqrt(s))) < 1e-12
            assert abs(np.linalg.norm(joint[2:]) - s**0.25) < 1e-12

    def test_total_h_loss(self):
        transfer = sagnac_transfer(bob_sagnac_settings(0.3), PBSParams(loss_h=1.0))
        assert np.linalg.norm(transfer[:, 0]) == pytest.approx(0.0, abs=1e-15)
        assert np.linalg.norm(transfer[:, 1]) <= 1.0 + 1e-12

    def test_loss_range_checked(self):
        with pytest.raises(DomainError):
            PBSParams(loss_v=1.5)


class TestPlateAngles:
    """Alice, 재준비, 판독 판 각도"""

    def test_alice_plate_prepares_state(self, random_s):
        for s in random_s:
            for sign in Sign:
                assert states_equal(alice_state_from_plate(alice_hwp_angle(s, sign)), prepare_alice(s, sign), 1e-12)

    def test_reprepare_plates(self, random_s):
        """rep.plus 는 |h⟩ → |φ+⟩, rep.minus 는 |v⟩ → |φ-⟩"""
        for s in random_s:
            angles = nominal_plate_angles(s)
            plus = hwp_jones(angles.rep_plus) @ H.vector
            minus = hwp_jones(angles.rep_minus) @ V.vector
            assert abs(abs(np.vdot(prepare_phi(s, Sign.PLUS).vector, plus)) - 1.0) < 1e-12
            assert abs(abs(np.vdot(prepare_phi(s, Sign.MINUS).vector, minus)) - 1.0) < 1e-12

    def test_readout_split_diagonal(self):
        transmitted, reflected = readout_split(math.pi / 8)
        assert np.linalg.norm(transmitted @ DIAG_PLUS.vector) == pytest.approx(1.0)
        assert np.linalg.norm(reflected @ DIAG_PLUS.vector) == pytest.approx(0.0, abs=1e-15)
        assert np.linalg.norm(reflected @ DIAG_MINUS.vector) == pytest.approx(1.0)

    def test_reflection_between_states(self):
        theta = reflection_angle_between(H, DIAG_PLUS)
        assert theta == pytest.approx(math.pi / 8)
        assert polarization_angle(V) == pytest.approx(math.pi / 2)

    def test_circular_state_rejected(self):
        from src.quantum.states import PolarizationState

        with pytest.raises(DomainError):
            polarization_angle(PolarizationState(1 / math.sqrt(2), 1j / math.sqrt(2)))
