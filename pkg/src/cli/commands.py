"""
CLI 명령 구현

각 명령은 RunConfig 를 받아 ResultBundle 을 돌려줍니다. 격자 점 g 의 난수는
(seed, g, ...) sub-stream 에서 파생하므로 출력은 워커 수와 무관합니다.
"""

from __future__ import annotations

import math
from typing import List, Optional, Tuple

from src.cli.io import BundleMetadata, DetectorRow, ResultBundle, SuccessRow
from src.cli.validation import run_validation
from src.config.susd_config import AlicePolicy, RunConfig
from src.imperfections.montecarlo import sample_tables
from src.photon_stats.counting import ProbabilityEstimate, estimate_probs, estimate_success, simulate_counts
from src.protocol.engine import analytic_detector_probs, joint_success_probability, run_session
from src.protocol.models import DETECTORS, detector_index
from src.quantum.states import Sign
from src.utils.error_handler import handle_errors
from src.utils.logging_config import get_logger, log_performance
from src.utils.random_streams import parallel_map, seed_from, substream

logger = get_logger(__name__)


def states_for(policy: AlicePolicy) -> Tuple[Sign, ...]:
    """출력에 포함할 Alice 상태"""
    if policy is AlicePolicy.FIXED_PLUS:
        return (Sign.PLUS,)
    if policy is AlicePolicy.FIXED_MINUS:
        return (Sign.MINUS,)
    return (Sign.PLUS, Sign.MINUS)


def _metadata(command: str, config: RunConfig) -> BundleMetadata:
    return BundleMetadata(
        command=command,
        seed=config.seed,
        config_hash=config.config_hash(),
        s_grid_source=config.s_grid_source,
        config=config.model_dump(mode="json", exclude={"workers", "output"}),
    )


def _analytic_rows(config: RunConfig, s: float, sign: Sign) -> List[DetectorRow]:
    table = analytic_detector_probs(s, sign, config.mapping)
    return [
        DetectorRow(s=s, state=sign.value, mu=mu, k=k.value, p_analytic=float(table[detector_index(mu, k)]))
        for mu, k in DETECTORS
    ]


@handle_errors()
@log_performance()
def cmd_analytic(config: RunConfig) -> ResultBundle:
    """닫힌 형태의 P_{μk} 와 P_succ"""
    bundle = ResultBundle(metadata=_metadata("analytic", config))
    for s in config.s_grid:
        for sign in states_for(config.alice_policy):
            bundle.detectors.extend(_analytic_rows(config, s, sign))
        bundle.success.append(SuccessRow(s=s, p_succ_analytic=joint_success_probability(s)))
    return bundle


def _simulate_point(job: Tuple[RunConfig, int, float]):
    """격자 점 하나: 세션 → 상태별 조건부 표 → 계수 통계 (프로세스 풀용)"""
    config, index, s = job
    session_cfg = config.session_config(s, seed=seed_from(substream(config.seed, index, 0)))
    stats = run_session(session_cfg, workers=1)

    estimates: List[Tuple[Sign, ProbabilityEstimate]] = []
    count_data, signs = [], []
    for sign_index, sign in enumerate(states_for(config.alice_policy)):
        table = stats.estimated_probs_for(sign)
        if stats.counts_by_sign[sign].sum() == 0:
            logger.warning(f"No trials with Alice state {sign.value} at s={s}; skipping its counting statistics")
            continue
        counts = simulate_counts(table / table.sum(), config.source, seed_from(substream(config.seed, index, 1, sign_index)))
        estimates.append((sign, estimate_probs(counts)))
        count_data.append(counts)
        signs.append(sign)

    success = estimate_success(count_data, config.mapping, signs) if count_data else None
    return stats, estimates, success


@handle_errors()
@log_performance()
def cmd_simulate(config: RunConfig, workers: Optional[int] = None) -> ResultBundle:
    """
    시행 시뮬레이션과 광자 계수 통계

    p_mean / p_std 는 배경 차감 추정치이고, JSON 에는 원시 추정치도 함께 기록합니다.
    """
    jobs = [(config, index, s) for index, s in enumerate(config.s_grid)]
    results = parallel_map(_simulate_point, jobs, config.workers if workers is None else workers)

    bundle = ResultBundle(metadata=_metadata("simulate", config))
    for s, (stats, estimates, success) in zip(config.s_grid, results):
        for sign, estimate in estimates:
            for row in _analytic_rows(config, s, sign):
                cell = detector_index(row.mu, row.k)
                row.p_mean = float(estimate.mean_subtracted[cell])
                row.p_std = float(estimate.std_subtracted[cell])
                row.p_mean_raw = float(estimate.mean[cell])
                row.p_std_raw = float(estimate.std[cell])
                bundle.detectors.append(row)

        p_session = stats.p_succ
        bundle.success.append(
            SuccessRow(
                s=s,
                p_succ_analytic=joint_success_probability(s),
                p_succ_mean=success.mean_subtracted if success else None,
                p_succ_std=success.std_subtracted if success else None,
                p_succ_session=p_session,
                p_succ_session_std=math.sqrt(p_session * (1.0 - p_session) / stats.trials),
                conclusive_errors=stats.conclusive_errors,
            )
        )
    return bundle


@handle_errors()
@log_performance()
def cmd_montecarlo(config: RunConfig, workers: Optional[int] = None) -> ResultBundle:
    """불완전성 엔벨로프"""
    samples = sample_tables(
        config.s_grid,
        config.imperfection,
        seed=config.seed,
        mapping=config.mapping,
        workers=config.workers if workers is None else workers,
    )
    states = states_for(config.alice_policy)
    envelopes = {sign: samples.envelope(sign) for sign in states}
    success = samples.envelope(None) if len(states) == 2 else envelopes[states[0]]

    bundle = ResultBundle(metadata=_metadata("montecarlo", config))
    for g, s in enumerate(config.s_grid):
        for sign in states:
            envelope = envelopes[sign]
            for row in _analytic_rows(config, s, sign):
                cell = (g, *detector_index(row.mu, row.k))
                row.p_env_min = float(envelope.minimum[cell])
                row.p_env_max = float(envelope.maximum[cell])
                row.p_env_mean = float(envelope.mean[cell])
                bundle.detectors.append(row)
        bundle.success.append(
            SuccessRow(
                s=s,
                p_succ_analytic=joint_success_probability(s),
                p_succ_env_min=float(success.p_succ_min[g]),
                p_succ_env_max=float(success.p_succ_max[g]),
                p_succ_env_mean=float(success.p_succ_mean[g]),
            )
        )
    return bundle


@handle_errors()
@log_performance()
def cmd_validate(config: RunConfig) -> ResultBundle:
    """검증 스위트 실행 (실패 여부는 bundle.passed)"""
    checks = run_validation(config.s_grid, config.mapping, config.fault_injection, config.seed)
    return ResultBundle(metadata=_metadata("validate", config), checks=checks)


COMMANDS = {
    "analytic": cmd_analytic,
    "simulate": cmd_simulate,
    "montecarlo": cmd_montecarlo,
    "validate": cmd_validate,
}
