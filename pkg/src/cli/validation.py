"""
오라클 동등성 및 불변식 검증 스위트

각 검사는 측정된 최대 편차와 허용 오차를 CheckResult 로 보고합니다.
fault_injection (판 이름 → 도) 은 광학 배치 쪽 검사에만 적용됩니다.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from src.cli.io import CheckResult
from src.imperfections.model import alice_state
from src.optics.jones import bob_sagnac_settings, sagnac_transfer
from src.optics.setup import compile_setup, kraus_path_blocks, phase_aligned_distance, transfer_to_kraus
from src.protocol.engine import analytic_detector_probs, exhaustive_detector_probs, joint_success_probability
from src.protocol.models import PortMapping
from src.quantum.measurements import (
    OutcomeLabel,
    bob_usd,
    charlie_usd,
    outcome_distribution,
    verify_completeness,
)
from src.quantum.neumark import kraus_set_from_dilation, neumark_dilation
from src.quantum.states import Sign, fidelity, prepare_alice, prepare_phi
from src.utils.logging_config import get_logger
from src.utils.random_streams import substream

logger = get_logger(__name__)

RANDOM_S_COUNT = 50
RANDOM_S_RANGE = (0.01, 0.99)


def _check(name: str, deviation: float, tolerance: float, detail: str = "") -> CheckResult:
    deviation = float(deviation)
    return CheckResult(
        name=name,
        deviation=deviation,
        tolerance=tolerance,
        passed=bool(math.isfinite(deviation) and deviation <= tolerance),
        detail=detail,
    )


def check_completeness(grid: Sequence[float]) -> CheckResult:
    deviation = max(max(verify_completeness(bob_usd(s)), verify_completeness(charlie_usd(s))) for s in grid)
    return _check("completeness", deviation, 1e-12, "max |sum A^dag A - I| for Bob and Charlie")


def check_unambiguity(grid: Sequence[float]) -> CheckResult:
    """결정적 결과가 틀린 상태를 가리킬 확률"""
    worst = 0.0
    for s in grid:
        for sign in Sign:
            wrong = OutcomeLabel.conclusive(sign.opposite)
            bob = dict(outcome_distribution(bob_usd(s), prepare_alice(s, sign)))
            charlie = dict(outcome_distribution(charlie_usd(s), prepare_phi(s, sign)))
            worst = max(worst, bob[wrong], charlie[wrong])
    return _check("unambiguity", worst, 1e-24, "max cross-conclusive probability")


def check_charlie_optimality(grid: Sequence[float]) -> CheckResult:
    """실패 확률 = √s, 실패 사후 상태는 부호와 무관"""
    worst = 0.0
    for s in grid:
        charlie = charlie_usd(s)
        failure = charlie.operator(OutcomeLabel.INCONCLUSIVE)
        posts = []
        for sign in Sign:
            phi = prepare_phi(s, sign)
            probability = dict(outcome_distribution(charlie, phi))[OutcomeLabel.INCONCLUSIVE]
            worst = max(worst, abs(probability - math.sqrt(s)))
            if probability > 1e-15:
                posts.append(phi.from_vector(failure @ phi.vector).normalized())
        if len(posts) == 2:
            worst = max(worst, abs(1.0 - fidelity(posts[0], posts[1])))
    return _check("charlie_optimality", worst, 1e-12, "|P_fail - sqrt(s)| and post-state fidelity")


def check_dilation(grid: Sequence[float]) -> CheckResult:
    """Neumark 확장의 유니터리성과 분기 연산자 재현"""
    worst = 0.0
    for s in grid:
        for kraus in (bob_usd(s), charlie_usd(s)):
            dilation = neumark_dilation(kraus)
            worst = max(worst, dilation.unitarity_deviation())
            recovered = kraus_set_from_dilation(dilation)
            for label, op in kraus:
                worst = max(worst, float(np.max(np.abs(recovered.operator(label) - op))))
    return _check("neumark_dilation", worst, 1e-10, "unitarity and branch-operator recovery")


def _random_grid(seed: int) -> List[float]:
    low, high = RANDOM_S_RANGE
    return [float(s) for s in substream(seed, 0xC0DE).uniform(low, high, size=RANDOM_S_COUNT)]


def check_optics_kraus(
    grid: Sequence[float],
    mapping: PortMapping,
    fault_injection: Optional[Mapping[str, float]] = None,
) -> CheckResult:
    """배치의 경로별 블록과 두 단계 Kraus 합성을 전역 위상 정렬 후 비교"""
    worst = 0.0
    for s in grid:
        transfer = compile_setup(s, mapping=mapping, hwp_offsets=fault_injection)
        expected = kraus_path_blocks(s, mapping)
        for detector, block in expected.items():
            worst = max(worst, phase_aligned_distance(transfer_to_kraus(transfer, detector), block))

        bob_transfer = sagnac_transfer(bob_sagnac_settings(s).perturbed(
            (fault_injection or {}).get("I1.cw", 0.0), (fault_injection or {}).get("I1.ccw", 0.0)
        ))
        bob = bob_usd(s)
        conclusive = bob.operator(OutcomeLabel.CONCLUSIVE_PLUS) + bob.operator(OutcomeLabel.CONCLUSIVE_MINUS)
        worst = max(worst, phase_aligned_distance(transfer_to_kraus(bob_transfer, "b0"), conclusive))
        worst = max(worst, phase_aligned_distance(transfer_to_kraus(bob_transfer, "b1"), bob.operator(OutcomeLabel.INCONCLUSIVE)))
    return _check("optics_kraus_equivalence", worst, 1e-10, "max phase-aligned Frobenius distance per path")


def check_isometry(grid: Sequence[float], mapping: PortMapping, fault_injection=None) -> CheckResult:
    worst = max(compile_setup(s, mapping=mapping, hwp_offsets=fault_injection).isometry_deviation() for s in grid)
    return _check("lossless_isometry", worst, 1e-12, "max |T^dag T - I|")


def check_optics_probabilities(grid: Sequence[float], mapping: PortMapping, fault_injection=None) -> CheckResult:
    """Alice 판으로 준비한 상태의 |Tψ|² 와 닫힌 형태 표 비교"""
    offsets = dict(fault_injection or {})
    worst = 0.0
    for s in grid:
        transfer = compile_setup(s, mapping=mapping, hwp_offsets=offsets)
        for sign in Sign:
            table = transfer.detector_probs(alice_state(s, sign, offsets.get("alice", 0.0)))
            worst = max(worst, float(np.max(np.abs(table - analytic_detector_probs(s, sign, mapping)))))
    return _check("optics_probabilities", worst, 1e-12, "max |P_optics - P_analytic|")


def check_oracle(grid: Sequence[float], mapping: PortMapping) -> CheckResult:
    """닫힌 형태와 완전 열거 오라클 비교, 표의 합, 성공 칸"""
    worst = 0.0
    for s in grid:
        for sign in Sign:
            analytic = analytic_detector_probs(s, sign, mapping)
            exhaustive = exhaustive_detector_probs(s, sign, mapping)
            worst = max(worst, float(np.max(np.abs(analytic - exhaustive))), abs(float(analytic.sum()) - 1.0))
            cell = mapping.cell(OutcomeLabel.conclusive(sign), OutcomeLabel.conclusive(sign))
            worst = max(worst, abs(float(analytic[cell]) - joint_success_probability(s)))
    return _check("analytic_oracle", worst, 1e-12, "closed form vs exhaustive composition")


def run_validation(
    grid: Sequence[float],
    mapping: Optional[PortMapping] = None,
    fault_injection: Optional[Mapping[str, float]] = None,
    seed: int = 0,
) -> List[CheckResult]:
    """전체 검증 스위트. 광학 검사는 격자와 무작위 s 50 개를 함께 사용합니다."""
    mapping = mapping or PortMapping.canonical()
    optics_grid = list(grid) + _random_grid(seed)
    checks: List[Callable[[], CheckResult]] = [
        lambda: check_completeness(grid),
        lambda: check_unambiguity(grid),
        lambda: check_charlie_optimality(grid),
        lambda: check_dilation(grid),
        lambda: check_oracle(optics_grid, mapping),
        lambda: check_optics_kraus(optics_grid, mapping, fault_injection),
        lambda: check_isometry(optics_grid, mapping, fault_injection),
        lambda: check_optics_probabilities(grid, mapping, fault_injection),
    ]
    results = []
    for run in checks:
        result = run()
        level = "info" if result.passed else "error"
        getattr(logger, level)(f"check {result.name}: deviation={result.deviation:.3e} tol={result.tolerance:.0e}")
        results.append(result)
    return results


def summarize(results: Sequence[CheckResult]) -> Dict[str, int]:
    return {"passed": sum(r.passed for r in results), "failed": sum(not r.passed for r in results)}
