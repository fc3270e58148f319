"""
불완전성 Monte Carlo 엔벨로프

샘플 하나는 불완전한 물리 배치 하나이며, 그 배치로 s 격자 전체를 훑습니다.
샘플 0 은 항상 공칭(이상적) 배치이고, 샘플 j ≥ 1 은 (seed, j) sub-stream 으로 추출합니다.
따라서 결과는 seed 와 샘플 수에만 의존하고 워커 수와는 무관합니다.
공칭 샘플은 하한/상한에만 들어가고 평균은 추출한 배치만으로 계산합니다.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.susd_config import ImperfectionConfig
from src.imperfections.model import PerturbedSetup, perturbed_tables, sample_imperfection
from src.protocol.engine import analytic_detector_probs
from src.protocol.models import PortMapping
from src.quantum.measurements import OutcomeLabel
from src.quantum.states import Sign
from src.utils.logging_config import get_logger, log_performance
from src.utils.random_streams import make_rng, parallel_map, seed_from, substream

logger = get_logger(__name__)

SIGNS: Tuple[Sign, ...] = (Sign.PLUS, Sign.MINUS)
PERCENTILES = (2.5, 97.5)
CHUNK_SIZE = 250


def success_cells(mapping: PortMapping) -> Dict[Sign, Tuple[int, int]]:
    """부호별 두 측정 모두 결정적이고 옳은 검출기 칸"""
    return {
        sign: mapping.cell(OutcomeLabel.conclusive(sign), OutcomeLabel.conclusive(sign)) for sign in SIGNS
    }


@dataclass
class EnvelopeResult:
    """
    s 격자 위의 엔벨로프

    sign 이 None 이면 두 Alice 상태를 평균한 결과입니다 (P_succ 그림과 같은 방식).
    표 배열은 (len(s_grid), 3, 3), P_succ 배열은 (len(s_grid),) 입니다.
    """

    s_grid: np.ndarray
    sign: Optional[Sign]
    minimum: np.ndarray
    mean: np.ndarray
    maximum: np.ndarray
    ideal: np.ndarray
    p_succ_min: np.ndarray
    p_succ_mean: np.ndarray
    p_succ_max: np.ndarray
    p_succ_ideal: np.ndarray
    throughput_min: np.ndarray
    throughput_mean: np.ndarray
    samples: int
    statistic: str = "minmax"

    def width(self) -> np.ndarray:
        return self.maximum - self.minimum

    def p_succ_width(self) -> np.ndarray:
        return self.p_succ_max - self.p_succ_min

    def contains_ideal(self, tol: float = 1e-12) -> bool:
        return bool(
            np.all(self.minimum - tol <= self.ideal)
            and np.all(self.ideal <= self.maximum + tol)
            and np.all(self.p_succ_min - tol <= self.p_succ_ideal)
            and np.all(self.p_succ_ideal <= self.p_succ_max + tol)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s_grid": self.s_grid.tolist(),
            "sign": self.sign.value if self.sign else None,
            "samples": self.samples,
            "statistic": self.statistic,
            "min": self.minimum.tolist(),
            "mean": self.mean.tolist(),
            "max": self.maximum.tolist(),
            "p_succ_min": self.p_succ_min.tolist(),
            "p_succ_mean": self.p_succ_mean.tolist(),
            "p_succ_max": self.p_succ_max.tolist(),
            "throughput_min": self.throughput_min.tolist(),
            "throughput_mean": self.throughput_mean.tolist(),
        }


def _draw_mean(values: np.ndarray) -> np.ndarray:
    """샘플 축 평균 (샘플이 둘 이상이면 공칭 샘플 0 제외)"""
    return values[1:].mean(axis=0) if values.shape[0] > 1 else values.mean(axis=0)


@dataclass
class MonteCarloSamples:
    """샘플별 재정규화 표 (samples, len(s_grid), 2, 3, 3) 와 처리량 (samples, len(s_grid), 2)"""

    s_grid: np.ndarray
    tables: np.ndarray
    throughput: np.ndarray
    mapping: PortMapping
    statistic: str = "minmax"

    @property
    def samples(self) -> int:
        return int(self.tables.shape[0])

    def _summarize(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """샘플 축(0) 을 따라 (하한, 평균, 상한). 평균은 공칭 샘플 0 을 빼고 추출한 배치만 사용."""
        mean = _draw_mean(values)
        if self.statistic == "percentile":
            low, high = np.percentile(values, PERCENTILES, axis=0)
            return low, mean, high
        low, high = values.min(axis=0), values.max(axis=0)
        return low, np.clip(mean, low, high), high

    def _success(self) -> np.ndarray:
        """(samples, len(s_grid), 2) 부호별 P_succ"""
        cells = success_cells(self.mapping)
        return np.stack([self.tables[:, :, i, cells[sign][0], cells[sign][1]] for i, sign in enumerate(SIGNS)], axis=-1)

    def envelope(self, sign: Optional[Sign]) -> EnvelopeResult:
        """부호 하나 (또는 None 이면 두 부호 평균) 의 엔벨로프"""
        success = self._success()
        if sign is None:
            tables = self.tables.mean(axis=2)
            p_succ = success.mean(axis=2)
            throughput = self.throughput.mean(axis=2)
            ideal = np.stack(
                [0.5 * sum(analytic_detector_probs(s, sg, self.mapping) for sg in SIGNS) for s in self.s_grid]
            )
        else:
            index = SIGNS.index(Sign(sign))
            tables = self.tables[:, :, index]
            p_succ = success[:, :, index]
            throughput = self.throughput[:, :, index]
            ideal = np.stack([analytic_detector_probs(s, sign, self.mapping) for s in self.s_grid])

        low, mean, high = self._summarize(tables)
        s_low, s_mean, s_high = self._summarize(p_succ)
        return EnvelopeResult(
            s_grid=self.s_grid,
            sign=None if sign is None else Sign(sign),
            minimum=low,
            mean=mean,
            maximum=high,
            ideal=ideal,
            p_succ_min=s_low,
            p_succ_mean=s_mean,
            p_succ_max=s_high,
            p_succ_ideal=(1.0 - np.sqrt(self.s_grid)) ** 2,
            throughput_min=throughput.min(axis=0),
            throughput_mean=_draw_mean(throughput),
            samples=self.samples,
            statistic=self.statistic,
        )


def _evaluate_chunk(job: Tuple[Tuple[float, ...], ImperfectionConfig, PortMapping, int, int, int]):
    """샘플 [start, stop) 평가 (프로세스 풀용)"""
    s_grid, cfg, mapping, base_seed, start, stop = job
    tables = np.zeros((stop - start, len(s_grid), len(SIGNS), 3, 3))
    throughput = np.zeros((stop - start, len(s_grid), len(SIGNS)))
    for row, index in enumerate(range(start, stop)):
        setup = PerturbedSetup.ideal() if index == 0 else sample_imperfection(cfg, substream(base_seed, index))
        for column, s in enumerate(s_grid):
            tables[row, column], throughput[row, column] = perturbed_tables(s, SIGNS, setup, mapping)
    return tables, throughput


def _resolve_seed(rng: Optional[np.random.Generator], seed: Optional[int]) -> int:
    if seed is not None:
        return int(seed)
    return seed_from(rng if rng is not None else make_rng())


@log_performance()
def sample_tables(
    s_grid: Sequence[float],
    cfg: ImperfectionConfig,
    rng: Optional[np.random.Generator] = None,
    *,
    seed: Optional[int] = None,
    mapping: Optional[PortMapping] = None,
    workers: Optional[int] = None,
) -> MonteCarloSamples:
    """cfg.samples 개 배치에 대한 표 계산 (샘플 0 은 공칭 배치)"""
    mapping = mapping or PortMapping.canonical()
    base_seed = _resolve_seed(rng, seed)
    grid = tuple(float(s) for s in s_grid)
    jobs: List[Tuple] = [
        (grid, cfg, mapping, base_seed, start, min(start + CHUNK_SIZE, cfg.samples))
        for start in range(0, cfg.samples, CHUNK_SIZE)
    ]
    parts = parallel_map(_evaluate_chunk, jobs, workers)
    tables = np.concatenate([part[0] for part in parts])
    throughput = np.concatenate([part[1] for part in parts])

    logger.info(
        f"Monte Carlo sweep finished: {cfg.samples} samples over {len(grid)} grid points",
        extra={"extra_fields": {"samples": cfg.samples, "grid_points": len(grid), "sampling": cfg.sampling}},
    )
    return MonteCarloSamples(
        s_grid=np.array(grid), tables=tables, throughput=throughput, mapping=mapping, statistic=cfg.statistic
    )


def mc_envelope(
    s_grid: Sequence[float],
    alice_sign: Sign,
    cfg: ImperfectionConfig,
    rng: Optional[np.random.Generator] = None,
    *,
    seed: Optional[int] = None,
    mapping: Optional[PortMapping] = None,
    workers: Optional[int] = None,
) -> EnvelopeResult:
    """Alice 상태 하나에 대한 P_{μk} 및 P_succ 엔벨로프"""
    return sample_tables(s_grid, cfg, rng, seed=seed, mapping=mapping, workers=workers).envelope(Sign(alice_sign))


def mc_success_envelope(
    s_grid: Sequence[float],
    cfg: ImperfectionConfig,
    rng: Optional[np.random.Generator] = None,
    *,
    seed: Optional[int] = None,
    mapping: Optional[PortMapping] = None,
    workers: Optional[int] = None,
) -> EnvelopeResult:
    """|ψ+⟩, |ψ-⟩ 평균 P_succ 엔벨로프"""
    return sample_tables(s_grid, cfg, rng, seed=seed, mapping=mapping, workers=workers).envelope(None)
