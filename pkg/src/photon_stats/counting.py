"""
광자 계수 통계

헤럴드 단일광자 광원의 동시 계수율, 우연 동시 계수율, 검출 효율로부터
런별 검출기 카운트를 Poisson 분포로 생성하고, 런별 정규화로 P_{μk} 를 다시 추정합니다.

    평균 카운트 = 동시계수율 × T × 효율 × P_{μk} + 우연계수율 × T / 9
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from src.config.susd_config import SourceConfig
from src.protocol.models import PortMapping
from src.quantum.measurements import OutcomeLabel
from src.quantum.states import Sign
from src.utils.error_handler import ContractError, EmptyRunError
from src.utils.logging_config import get_logger, log_performance
from src.utils.random_streams import make_rng, seed_from, substream

logger = get_logger(__name__)

DETECTOR_COUNT = 9
PROBABILITY_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CountData:
    """런별 검출기 카운트 (runs, 3, 3) 와 검출기당 기대 우연 카운트"""

    counts: np.ndarray
    expected_accidentals: float = 0.0

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 3 or counts.shape[1:] != (3, 3):
            raise ContractError(f"Counts must have shape (runs, 3, 3), got {counts.shape}")
        if np.any(counts < 0):
            raise ContractError("Counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def runs(self) -> int:
        return int(self.counts.shape[0])

    def run_totals(self) -> np.ndarray:
        return self.counts.sum(axis=(1, 2))


@dataclass(frozen=True)
class ProbabilityEstimate:
    """검출기별 평균과 런 간 표본 표준편차 (원시, 배경 차감)"""

    mean: np.ndarray
    std: np.ndarray
    mean_subtracted: np.ndarray
    std_subtracted: np.ndarray
    runs: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "mean_subtracted": self.mean_subtracted.tolist(),
            "std_subtracted": self.std_subtracted.tolist(),
            "runs": self.runs,
        }


@dataclass(frozen=True)
class SuccessEstimate:
    mean: float
    std: float
    mean_subtracted: float
    std_subtracted: float
    runs: int


def expected_counts(probs: np.ndarray, src: SourceConfig) -> Tuple[np.ndarray, np.ndarray]:
    """런당 검출기별 (기대 신호 카운트, 기대 우연 카운트)"""
    probs = np.asarray(probs, dtype=float)
    signal = src.coincidence_rate * src.integration_time * src.detector_efficiency * probs
    accidental = np.full(probs.shape, src.accidental_rate * src.integration_time / DETECTOR_COUNT)
    return signal, accidental


def _base_seed(rng: Union[np.random.Generator, int, None]) -> int:
    if rng is None:
        return seed_from(make_rng())
    if isinstance(rng, np.random.Generator):
        return seed_from(rng)
    return int(rng)


@log_performance()
def simulate_counts(
    probs: np.ndarray,
    src: SourceConfig,
    rng: Union[np.random.Generator, int, None] = None,
) -> CountData:
    """
    런별 Poisson 카운트 생성

    런 r 은 (seed, r) sub-stream 을 사용합니다. 정수 시드를 주면 그 값을 그대로 씁니다.

    Raises:
        ContractError: probs 의 합이 1 에서 1e-9 이상 벗어날 때
    """
    probs = np.asarray(probs, dtype=float)
    total = float(probs.sum())
    if abs(total - 1.0) > PROBABILITY_SUM_TOLERANCE or np.any(probs < 0):
        raise ContractError(f"Detector probabilities must be non-negative and sum to 1, got sum {total!r}")

    signal, accidental = expected_counts(probs, src)
    mean = signal + accidental
    base_seed = _base_seed(rng)
    counts = np.stack([substream(base_seed, run).poisson(mean) for run in range(src.runs)])
    return CountData(counts=counts.astype(np.int64), expected_accidentals=float(accidental[0, 0]))


def _per_run(c: CountData) -> Tuple[np.ndarray, np.ndarray]:
    """런별 (원시 확률, 배경 차감 확률)"""
    if c.runs < 2:
        raise EmptyRunError(f"At least 2 runs are needed for a standard deviation, got {c.runs}")
    totals = c.run_totals()
    empty = np.flatnonzero(totals == 0)
    if empty.size:
        raise EmptyRunError(f"Run {int(empty[0])} recorded no counts", run_index=int(empty[0]))

    raw = c.counts / totals[:, None, None]
    signal_totals = totals - DETECTOR_COUNT * c.expected_accidentals
    with np.errstate(divide="ignore", invalid="ignore"):
        subtracted = (c.counts - c.expected_accidentals) / signal_totals[:, None, None]
    if np.any(signal_totals <= 0):
        logger.warning("Background-subtracted estimates are undefined for runs without signal counts")
        subtracted = np.where(signal_totals[:, None, None] > 0, subtracted, np.nan)
    return raw, subtracted


def estimate_probs(c: CountData) -> ProbabilityEstimate:
    """
    런별 정규화 후 평균과 표본 표준편차 (ddof=1)

    배경 차감 추정치는 기대 우연 카운트를 빼고 정규화하며 음수로 잘라내지 않습니다.

    Raises:
        EmptyRunError: 런이 2 개 미만이거나 카운트가 0 인 런이 있을 때
    """
    raw, subtracted = _per_run(c)
    return ProbabilityEstimate(
        mean=raw.mean(axis=0),
        std=raw.std(axis=0, ddof=1),
        mean_subtracted=subtracted.mean(axis=0),
        std_subtracted=subtracted.std(axis=0, ddof=1),
        runs=c.runs,
    )


def estimate_success(
    data: Union[CountData, Sequence[CountData]],
    mapping: Optional[PortMapping] = None,
    signs: Optional[Sequence[Sign]] = None,
) -> SuccessEstimate:
    """
    런별 P_succ 추정 (두 측정 모두 결정적이고 옳은 칸의 확률)

    여러 Alice 상태의 CountData 를 주면 런 단위로 평균한 뒤 통계를 냅니다.
    signs 로 각 CountData 의 Alice 상태를 알려주면 그 상태의 성공 칸만, 없으면 두 성공 칸의 합을 씁니다.
    """
    mapping = mapping or PortMapping.canonical()
    datasets = [data] if isinstance(data, CountData) else list(data)
    if not datasets:
        raise EmptyRunError("No count data given")
    if signs is not None and len(signs) != len(datasets):
        raise ContractError(f"Got {len(signs)} signs for {len(datasets)} count data sets")

    def cells(sign: Optional[Sign]):
        chosen = list(Sign) if sign is None else [Sign(sign)]
        return [mapping.cell(OutcomeLabel.conclusive(sg), OutcomeLabel.conclusive(sg)) for sg in chosen]

    raw_runs, sub_runs = [], []
    for index, c in enumerate(datasets):
        success_cells = cells(None if signs is None else signs[index])
        raw, subtracted = _per_run(c)
        raw_runs.append(sum(raw[:, row, col] for row, col in success_cells))
        sub_runs.append(sum(subtracted[:, row, col] for row, col in success_cells))
    runs = min(len(r) for r in raw_runs)
    raw_mean = np.mean([r[:runs] for r in raw_runs], axis=0)
    sub_mean = np.mean([r[:runs] for r in sub_runs], axis=0)
    return SuccessEstimate(
        mean=float(raw_mean.mean()),
        std=float(raw_mean.std(ddof=1)),
        mean_subtracted=float(sub_mean.mean()),
        std_subtracted=float(sub_mean.std(ddof=1)),
        runs=runs,
    )
