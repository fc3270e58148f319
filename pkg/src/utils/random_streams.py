"""
재현 가능한 난수 스트림과 병렬 실행 유틸리티

모든 확률적 연산은 numpy Generator(PCG64)를 사용합니다.
병렬/분할 실행 시에는 (seed, index) 로부터 독립 sub-stream을 만들어
워커 수와 관계없이 결과가 같도록 합니다.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

from src.utils.env_validator import get_optional_env

T = TypeVar("T")
R = TypeVar("R")


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """시드로부터 Generator 생성"""
    return np.random.default_rng(seed)


def substream(seed: int, *key: int) -> np.random.Generator:
    """
    (seed, key...) 로 식별되는 독립 sub-stream

    같은 (seed, key)는 항상 같은 스트림을 돌려주며, 다른 key와는 통계적으로 독립입니다.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def seed_from(rng: np.random.Generator) -> int:
    """Generator 에서 하위 시드 하나를 뽑아 sub-stream 파생에 사용"""
    return int(rng.integers(0, 2**63 - 1))


def default_workers() -> int:
    """SUSD_WORKERS 환경 변수 (기본 1)"""
    try:
        return max(1, int(get_optional_env("SUSD_WORKERS", "1") or "1"))
    except ValueError:
        return 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    입력 순서를 보존하는 map

    workers > 1 이면 ProcessPoolExecutor 를 사용하므로 fn 과 items 는 picklable 이어야 합니다.
    """
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(fn, items))
