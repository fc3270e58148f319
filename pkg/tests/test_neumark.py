"""
Neumark 확장 테스트

두 분기 보조계 확장의 유니터리성, 분기 연산자 복원, 상태 작용을 검증합니다.
"""
import math
import os
import sys

import numpy as np
import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.quantum.measurements import KrausSet, OutcomeLabel, bob_usd, charlie_usd
from src.quantum.neumark import complete_isometry, kraus_from_dilation, kraus_set_from_dilation, neumark_dilation
from src.quantum.states import DIAG_PLUS, H, Sign, prepare_alice, prepare_phi, projector
from src.utils.error_handler import ContractError, DimensionError

PLUS = OutcomeLabel.CONCLUSIVE_PLUS
MINUS = OutcomeLabel.CONCLUSIVE_MINUS
FAIL = OutcomeLabel.INCONCLUSIVE


class TestDilation:
    """확장 유니터리"""

    @pytest.mark.parametrize("factory", [bob_usd, charlie_usd])
    def test_unitary(self, factory, random_s):
        for s in random_s:
            assert neumark_dilation(factory(s)).unitarity_deviation() < 1e-10

    @pytest.mark.parametrize("factory", [bob_usd, charlie_usd])
    def test_round_trip(self, factory, random_s):
        """확장에서 꺼낸 Kraus 원소가 입력과 같음"""
        for s in random_s:
            original = factory(s)
            recovered = kraus_set_from_dilation(neumark_dilation(original))
            for label, op in original:
                assert np.max(np.abs(recovered.operator(label) - op)) < 1e-10

    def test_action_on_alice_states(self, random_s):
        """U|ψ±⟩|B⟩ = √(1-√s)|±⟩|b0⟩ ∓ s^{1/4}|φ±⟩|b1⟩"""
        for s in random_s:
            dilation = neumark_dilation(bob_usd(s))
            for sign in Sign:
                joint = dilation.act(prepare_alice(s, sign).vector)
                conclusive, failure = joint[:2], joint[2:]
                diag = prepare_alice(0.0, sign).vector
                assert np.allclose(conclusive, math.sqrt(1 - math.sqrt(s)) * diag, atol=1e-10)
                assert np.allclose(failure, -sign.factor * s**0.25 * prepare_phi(s, sign).vector, atol=1e-10)

    def test_action_on_phi_states(self, random_s):
        """U|φ±⟩|C⟩ 의 실패 분기는 부호와 무관한 |h⟩"""
        for s in random_s:
            dilation = neumark_dilation(charlie_usd(s))
            failures = [dilation.act(prepare_phi(s, sign).vector)[2:] for sign in Sign]
            assert np.allclose(np.abs(failures[0]), np.abs(failures[1]), atol=1e-10)
            assert abs(np.linalg.norm(failures[0]) - s**0.25) < 1e-10
            assert abs(failures[0][1]) < 1e-10

    def test_branch_extraction(self):
        dilation = neumark_dilation(bob_usd(0.3))
        assert np.allclose(kraus_from_dilation(dilation, 1), bob_usd(0.3).operator(FAIL), atol=1e-10)

    def test_incomplete_set_rejected(self):
        half = KrausSet.from_mapping({label: 0.5 * op for label, op in bob_usd(0.3)})
        with pytest.raises(ContractError):
            neumark_dilation(half)

    def test_non_orthogonal_ranges_rejected(self):
        """결정적 원소의 치역이 직교하지 않으면 한 분기로 판독할 수 없음"""
        root_half = math.sqrt(0.5)
        m = KrausSet.from_mapping(
            {
                PLUS: root_half * projector(H),
                MINUS: root_half * np.outer(DIAG_PLUS.vector, H.vector.conj()),
                FAIL: np.diag([0.0, 1.0]),
            }
        )
        with pytest.raises(DimensionError):
            neumark_dilation(m)


class TestCompleteIsometry:
    """등거리 사상의 유니터리 완성"""

    def test_constrained_columns_kept(self):
        columns = np.vstack([bob_usd(0.5).operator(PLUS) + bob_usd(0.5).operator(MINUS), bob_usd(0.5).operator(FAIL)])
        unitary = complete_isometry(columns, constrained=(0, 1))
        assert np.allclose(unitary[:, :2], columns, atol=1e-12)
        assert np.allclose(unitary.conj().T @ unitary, np.eye(4), atol=1e-12)
