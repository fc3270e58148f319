"""
편광 상태와 상태족 준비 테스트

Alice 상태 |ψ±⟩, 재준비 상태 |φ±⟩ 의 계수, 정규화, 내적 관계를 검증합니다.
"""
import math
import os
import sys

import numpy as np
import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.quantum.states import (
    DIAG_MINUS,
    DIAG_PLUS,
    H,
    V,
    PolarizationState,
    Sign,
    apply_operator,
    coefficients_from_overlap,
    diagonal,
    fidelity,
    overlap,
    prepare_alice,
    prepare_phi,
    projector,
    states_equal,
)
from src.utils.error_handler import DomainError

DENSE_GRID = np.linspace(0.0, 1.0, 201)


class TestCoefficients:
    """a, b 계수 계산"""

    def test_orthogonal_case(self):
        """s=0 이면 a = b = 1/√2"""
        params = coefficients_from_overlap(0.0)
        assert params.a == pytest.approx(1 / math.sqrt(2), abs=1e-12)
        assert params.b == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    def test_identical_case(self):
        params = coefficients_from_overlap(1.0)
        assert params.a == pytest.approx(1.0, abs=1e-12)
        assert params.b == pytest.approx(0.0, abs=1e-12)

    def test_quarter(self):
        params = coefficients_from_overlap(0.25)
        assert params.a == pytest.approx(0.79057, abs=1e-5)
        assert params.b == pytest.approx(0.61237, abs=1e-5)

    def test_relations_on_dense_grid(self):
        """a² = (1+s)/2, b² = (1-s)/2, a ≥ b ≥ 0"""
        for s in DENSE_GRID:
            params = coefficients_from_overlap(float(s))
            assert abs(params.a**2 - (1 + s) / 2) < 1e-12
            assert abs(params.b**2 - (1 - s) / 2) < 1e-12
            assert params.a >= params.b >= 0.0

    @pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
    def test_out_of_range(self, bad):
        """범위 밖 s 는 값과 함께 DomainError"""
        with pytest.raises(DomainError) as exc_info:
            coefficients_from_overlap(bad)
        assert exc_info.value.parameter == "s"
        assert "s must lie in [0, 1]" in exc_info.value.message


class TestPrepareAlice:
    """Alice 상태 준비"""

    def test_identical_states_are_h(self):
        assert states_equal(prepare_alice(1.0, Sign.PLUS), H)

    def test_orthogonal_minus_is_diagonal_minus(self):
        assert states_equal(prepare_alice(0.0, Sign.MINUS), DIAG_MINUS)

    def test_overlap_equals_s(self):
        for s in DENSE_GRID:
            value = overlap(prepare_alice(float(s), Sign.PLUS), prepare_alice(float(s), Sign.MINUS))
            assert abs(value - s) < 1e-12

    def test_normalized_and_real_first_component(self):
        for s in DENSE_GRID:
            for sign in Sign:
                state = prepare_alice(float(s), sign)
                assert abs(state.norm - 1.0) < 1e-12
                assert state.c_h.imag == 0.0 and state.c_h.real >= 0.0

    def test_sign_accepts_string(self):
        assert prepare_alice(0.3, "-") == prepare_alice(0.3, Sign.MINUS)


class TestPreparePhi:
    """재준비 상태 |φ±⟩"""

    def test_quarter_plus(self):
        state = prepare_phi(0.25, Sign.PLUS)
        assert state.c_h.real == pytest.approx(0.5, abs=1e-12)
        assert state.c_v.real == pytest.approx(-0.86603, abs=1e-5)

    def test_overlap_is_minus_root_s(self):
        for s in DENSE_GRID:
            value = overlap(prepare_phi(float(s), Sign.PLUS), prepare_phi(float(s), Sign.MINUS))
            assert abs(value + math.sqrt(s)) < 1e-12

    def test_orthogonal_pair_at_zero(self):
        """s=0 이면 (|h⟩∓|v⟩)/√2"""
        assert states_equal(prepare_phi(0.0, Sign.PLUS), DIAG_MINUS)
        assert states_equal(prepare_phi(0.0, Sign.MINUS), DIAG_PLUS)

    def test_normalized(self):
        for s in DENSE_GRID:
            for sign in Sign:
                assert abs(prepare_phi(float(s), sign).norm - 1.0) < 1e-12


class TestStateHelpers:
    """내적, 충실도, 위상 무시 비교"""

    def test_basis_orthogonal(self):
        assert overlap(H, V) == 0

    def test_self_overlap(self):
        state = prepare_alice(0.4, Sign.MINUS)
        assert abs(overlap(state, state) - 1.0) < 1e-12

    def test_conjugate_linear_first_argument(self):
        u = PolarizationState(1j / math.sqrt(2), 1 / math.sqrt(2))
        v = DIAG_PLUS
        assert overlap(u, v) == pytest.approx(np.conj(overlap(v, u)))
        assert overlap(u, v) == pytest.approx((-1j + 1) / 2)

    def test_global_phase_ignored(self):
        state = prepare_phi(0.36, Sign.MINUS)
        rotated = PolarizationState(state.c_h * 1j, state.c_v * 1j)
        assert states_equal(state, rotated)
        assert not states_equal(state, prepare_phi(0.36, Sign.PLUS))

    def test_fidelity_of_diagonal_pair(self):
        assert fidelity(DIAG_PLUS, DIAG_MINUS) == pytest.approx(0.0, abs=1e-15)
        assert fidelity(H, DIAG_PLUS) == pytest.approx(0.5)

    def test_diagonal_lookup(self):
        assert diagonal(Sign.PLUS) is DIAG_PLUS
        assert diagonal("-") is DIAG_MINUS

    def test_projector_and_apply(self):
        result = apply_operator(projector(DIAG_PLUS), H)
        assert result.norm == pytest.approx(1 / math.sqrt(2))
        assert states_equal(result, DIAG_PLUS)

    def test_sign_helpers(self):
        assert Sign.PLUS.factor == 1.0 and Sign.MINUS.factor == -1.0
        assert Sign.PLUS.opposite is Sign.MINUS
