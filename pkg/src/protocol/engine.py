"""
SUSD 세션 엔진

Alice 상태 준비 → Bob 비최적 USD → 재준비 → Charlie 최적 USD → 검출기 매핑 순으로
시행을 진행하고 P_{μk}, P_succ 를 집계합니다.

난수 소비 규약 (시행당 균등 난수 3개):
    u[0] → Alice 부호 (random 정책에서 u < 0.5 이면 +)
    u[1] → Bob 결과 (역 CDF, 순서 +, -, i)
    u[2] → Charlie 결과 (역 CDF, 순서 +, -, i)
매핑을 시행마다 무작위화할 때는 그 뒤에 순열 인덱스를 뽑습니다.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.config.susd_config import AlicePolicy, SessionConfig
from src.protocol.models import (
    BOB_OUTCOME_ORDER,
    CHARLIE_OUTCOME_ORDER,
    PERMUTATIONS,
    PortMapping,
    SessionStats,
    TrialRecord,
    empty_table,
)
from src.quantum.measurements import (
    MIN_TOTAL_PROBABILITY,
    OUTCOME_ORDER,
    OutcomeLabel,
    bob_usd,
    charlie_usd,
    outcome_distribution,
)
from src.quantum.states import PolarizationState, Sign, prepare_alice, prepare_phi
from src.utils.error_handler import ProtocolError, require_unit_interval
from src.utils.logging_config import get_logger, log_performance
from src.utils.random_streams import parallel_map, seed_from, substream

logger = get_logger(__name__)

# OUTCOME_ORDER 인덱스 → 매핑 표의 Bob/Charlie 순서 인덱스
_BOB_ROW = np.array([BOB_OUTCOME_ORDER.index(label) for label in OUTCOME_ORDER])
_CHARLIE_COL = np.array([CHARLIE_OUTCOME_ORDER.index(label) for label in OUTCOME_ORDER])


def reprepare(
    bob_outcome: OutcomeLabel,
    s: float,
    post_state: Optional[PolarizationState] = None,
) -> PolarizationState:
    """
    Bob 결과에 따라 Charlie 에게 보낼 상태 결정

    결정적 결과 |±⟩ 는 |φ±⟩ 로 다시 준비하고, 비결정적 결과의 사후 상태(이미 ∓|φ±⟩)는 그대로 전달합니다.

    Raises:
        ProtocolError: 비결정적 결과인데 사후 상태가 없을 때
    """
    label = OutcomeLabel(bob_outcome)
    if label.is_conclusive:
        return prepare_phi(s, label.sign)
    if post_state is None:
        raise ProtocolError("An inconclusive outcome forwards Bob's post-measurement state, but none was given")
    return post_state


def _alice_sign(policy: AlicePolicy, u: float) -> Sign:
    if policy is AlicePolicy.FIXED_PLUS:
        return Sign.PLUS
    if policy is AlicePolicy.FIXED_MINUS:
        return Sign.MINUS
    return Sign.PLUS if u < 0.5 else Sign.MINUS


def randomize_port_mapping(rng: np.random.Generator) -> PortMapping:
    """Bob 경로와 간섭계별 검출기 배정을 균등 무작위 순열로 선택"""
    bob_perm = int(rng.integers(len(PERMUTATIONS)))
    charlie_perms = tuple(int(i) for i in rng.integers(len(PERMUTATIONS), size=3))
    return PortMapping.from_permutations(bob_perm, charlie_perms)


def run_trial(cfg: SessionConfig, rng: np.random.Generator) -> TrialRecord:
    """
    시행 한 번 (시드가 같으면 결과도 같음)

    run_session 과 같은 분기표와 역 CDF 샘플링을 사용합니다.
    """
    u = rng.random(3)
    sign = _alice_sign(cfg.alice_policy, float(u[0]))
    bob_probs, charlie_probs = _branch_table(cfg.s)[sign]
    bob_index = int(_sample_indices(bob_probs, u[1:2])[0])
    charlie_index = int(_sample_indices(charlie_probs[bob_index], u[2:3])[0])
    bob_outcome, charlie_outcome = OUTCOME_ORDER[bob_index], OUTCOME_ORDER[charlie_index]

    mapping = randomize_port_mapping(rng) if cfg.randomize_mapping_per_trial else cfg.mapping
    return TrialRecord(
        alice_sign=sign,
        bob_outcome=bob_outcome,
        charlie_outcome=charlie_outcome,
        detector=mapping.detector(bob_outcome, charlie_outcome),
    )


@lru_cache(maxsize=64)
def _branch_table(s: float) -> Dict[Sign, Tuple[np.ndarray, np.ndarray]]:
    """
    부호별 (Bob 분포, Bob 결과별 Charlie 분포) 를 OUTCOME_ORDER 기준 배열로 계산

    Charlie 분포는 Bob 결과 확률이 0 이 아닌 분기에서만 계산합니다 (0 이면 행이 0).
    결과는 캐시되므로 호출자는 배열을 수정하지 않습니다.
    """
    bob = bob_usd(s)
    charlie = charlie_usd(s)
    table = {}
    for sign in Sign:
        alice = prepare_alice(s, sign)
        bob_probs = np.array([p for _, p in outcome_distribution(bob, alice)])
        charlie_probs = np.zeros((3, 3))
        for index, (label, op) in enumerate(bob.elements):
            if bob_probs[index] < MIN_TOTAL_PROBABILITY:
                continue
            post = PolarizationState.from_vector(op @ alice.vector).normalized()
            forwarded = reprepare(label, s, post)
            charlie_probs[index] = [p for _, p in outcome_distribution(charlie, forwarded)]
        table[sign] = (bob_probs, charlie_probs)
    return table


def analytic_detector_probs(s: float, alice_sign: Sign, mapping: Optional[PortMapping] = None) -> np.ndarray:
    """
    닫힌 형태의 P_{μk} 표 (행 μ = 2, 3, 4 / 열 k = +, -, i)

    Alice 부호 σ 에 대해 0 이 아닌 칸은 네 개뿐입니다:
        (Bob σ, Charlie σ) = (1-√s)²,  (Bob σ, Charlie i) = (1-√s)√s,
        (Bob i, Charlie σ) = √s(1-√s),  (Bob i, Charlie i) = s
    """
    s = require_unit_interval("s", s)
    mapping = mapping or PortMapping.canonical()
    root_s = math.sqrt(s)
    conclusive = OutcomeLabel.conclusive(Sign(alice_sign))
    inconclusive = OutcomeLabel.INCONCLUSIVE

    table = np.zeros((3, 3))
    for bob_outcome, charlie_outcome, probability in (
        (conclusive, conclusive, (1.0 - root_s) ** 2),
        (conclusive, inconclusive, (1.0 - root_s) * root_s),
        (inconclusive, conclusive, root_s * (1.0 - root_s)),
        (inconclusive, inconclusive, s),
    ):
        table[mapping.cell(bob_outcome, charlie_outcome)] += probability
    return table


def exhaustive_detector_probs(s: float, alice_sign: Sign, mapping: Optional[PortMapping] = None) -> np.ndarray:
    """두 단계의 outcome_distribution 을 샘플링 없이 모두 합성한 P_{μk} 표"""
    s = require_unit_interval("s", s)
    mapping = mapping or PortMapping.canonical()
    bob_probs, charlie_probs = _branch_table(s)[Sign(alice_sign)]
    table = np.zeros((3, 3))
    for i, bob_outcome in enumerate(OUTCOME_ORDER):
        for j, charlie_outcome in enumerate(OUTCOME_ORDER):
            table[mapping.cell(bob_outcome, charlie_outcome)] += bob_probs[i] * charlie_probs[i, j]
    return table


def joint_success_probability(s: float) -> float:
    """Bob 과 Charlie 가 모두 성공할 확률의 상한 (1-√s)²"""
    s = require_unit_interval("s", s)
    return (1.0 - math.sqrt(s)) ** 2


def _sample_indices(probabilities: np.ndarray, u: np.ndarray) -> np.ndarray:
    """sample_index 의 벡터 버전 (같은 확률, 같은 u 에 대해 같은 결과)"""
    cleaned = np.where(probabilities < MIN_TOTAL_PROBABILITY, 0.0, probabilities)
    cumulative = np.cumsum(cleaned)
    cumulative = cumulative / cumulative[-1]
    return np.minimum(np.searchsorted(cumulative, u, side="right"), len(probabilities) - 1)


def _mapping_tables(cfg: SessionConfig, rng: np.random.Generator, n: int) -> np.ndarray:
    """시행별 검출기 조회표 (n, 3, 3). 고정 매핑이면 모두 같은 표."""
    if not cfg.randomize_mapping_per_trial:
        return np.broadcast_to(cfg.mapping.lookup_table(), (n, 3, 3))

    bob_perms = rng.integers(len(PERMUTATIONS), size=n)
    charlie_perms = rng.integers(len(PERMUTATIONS), size=(n, 3))
    cache: Dict[Tuple[int, int, int, int], np.ndarray] = {}
    tables = np.empty((n, 3, 3), dtype=np.int64)
    for t in range(n):
        key = (int(bob_perms[t]), *(int(p) for p in charlie_perms[t]))
        if key not in cache:
            cache[key] = PortMapping.from_permutations(key[0], key[1:]).lookup_table()
        tables[t] = cache[key]
    return tables


def _simulate_block(cfg: SessionConfig, trials: int, rng: np.random.Generator) -> SessionStats:
    """한 스트림에서 trials 회 시행을 벡터화하여 집계"""
    u = rng.random((trials, 3))
    if cfg.alice_policy is AlicePolicy.RANDOM:
        is_plus = u[:, 0] < 0.5
    else:
        is_plus = np.full(trials, cfg.alice_policy is AlicePolicy.FIXED_PLUS)

    branches = _branch_table(cfg.s)
    bob_idx = np.zeros(trials, dtype=np.int64)
    charlie_idx = np.zeros(trials, dtype=np.int64)
    for sign, mask in ((Sign.PLUS, is_plus), (Sign.MINUS, ~is_plus)):
        if not mask.any():
            continue
        bob_probs, charlie_probs = branches[sign]
        bob_idx[mask] = _sample_indices(bob_probs, u[mask, 1])
        for i in range(3):
            sub = mask & (bob_idx == i)
            if sub.any():
                charlie_idx[sub] = _sample_indices(charlie_probs[i], u[sub, 2])

    lookup = _mapping_tables(cfg, rng, trials)
    flat = lookup[np.arange(trials), _BOB_ROW[bob_idx], _CHARLIE_COL[charlie_idx]]

    inconclusive = OUTCOME_ORDER.index(OutcomeLabel.INCONCLUSIVE)
    expected = np.where(is_plus, OUTCOME_ORDER.index(OutcomeLabel.CONCLUSIVE_PLUS),
                        OUTCOME_ORDER.index(OutcomeLabel.CONCLUSIVE_MINUS))
    bob_conclusive = bob_idx != inconclusive
    charlie_conclusive = charlie_idx != inconclusive
    success = (bob_idx == expected) & (charlie_idx == expected)
    errors = (bob_conclusive & (bob_idx != expected)) | (charlie_conclusive & (charlie_idx != expected))

    counts_by_sign = {
        Sign.PLUS: np.bincount(flat[is_plus], minlength=9).reshape(3, 3),
        Sign.MINUS: np.bincount(flat[~is_plus], minlength=9).reshape(3, 3),
    }
    return SessionStats(
        s=cfg.s,
        trials=trials,
        counts=counts_by_sign[Sign.PLUS] + counts_by_sign[Sign.MINUS],
        counts_by_sign=counts_by_sign,
        successes=int(success.sum()),
        successes_by_sign={Sign.PLUS: int((success & is_plus).sum()), Sign.MINUS: int((success & ~is_plus).sum())},
        bob_conclusive=int(bob_conclusive.sum()),
        charlie_conclusive=int(charlie_conclusive.sum()),
        conclusive_errors=int(errors.sum()),
    )


def _run_shard(job: Tuple[SessionConfig, int, int, int]) -> SessionStats:
    """프로세스 풀에서 호출되는 샤드 실행 (picklable)"""
    cfg, trials, base_seed, shard = job
    return _simulate_block(cfg, trials, substream(base_seed, shard))


def shard_sizes(trials: int, shards: int) -> List[int]:
    """시행 수를 샤드에 나눔 (앞쪽 샤드가 나머지를 하나씩 더 가짐)"""
    base, remainder = divmod(trials, shards)
    return [base + (1 if k < remainder else 0) for k in range(shards)]


@log_performance()
def run_session(
    cfg: SessionConfig,
    rng: Optional[np.random.Generator] = None,
    workers: Optional[int] = None,
) -> SessionStats:
    """
    세션 전체 실행

    rng 가 없으면 cfg.seed 로 스트림을 만듭니다. cfg.shards > 1 이면 (seed, shard) sub-stream 으로
    나누어 실행하므로 결과는 (seed, shards) 에만 의존하고 workers 와는 무관합니다.
    """
    if cfg.shards == 1:
        stats = _simulate_block(cfg, cfg.trials, rng if rng is not None else substream(cfg.seed))
    else:
        base_seed = cfg.seed if rng is None else seed_from(rng)
        jobs = [
            (cfg, size, base_seed, shard)
            for shard, size in enumerate(shard_sizes(cfg.trials, cfg.shards))
            if size > 0
        ]
        parts = parallel_map(_run_shard, jobs, workers)
        stats = parts[0]
        for part in parts[1:]:
            stats = stats.merge(part)

    if stats.conclusive_errors:
        logger.error(f"{stats.conclusive_errors} conclusive outcomes disagreed with Alice's state at s={cfg.s}")
    logger.info(
        f"Session finished: s={cfg.s}, trials={stats.trials}, p_succ={stats.p_succ:.6f}",
        extra={"extra_fields": {"s": cfg.s, "trials": stats.trials, "successes": stats.successes}},
    )
    return stats


def empirical_table(stats: SessionStats, sign: Optional[Sign] = None) -> np.ndarray:
    """세션 카운트를 확률 표로 (부호 지정 시 해당 부호 조건부)"""
    if sign is None:
        return stats.estimated_probs
    return stats.estimated_probs_for(sign)


__all__ = [
    "analytic_detector_probs",
    "empirical_table",
    "empty_table",
    "exhaustive_detector_probs",
    "joint_success_probability",
    "randomize_port_mapping",
    "reprepare",
    "run_session",
    "run_trial",
    "shard_sizes",
]
