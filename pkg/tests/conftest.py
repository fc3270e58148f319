"""
공통 pytest 설정

slow 마커가 붙은 테스트는 기본 실행에서 제외하고 `--runslow` 로만 실행합니다.
"""
import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def s_grid():
    """7점 기본 격자"""
    from src.config.susd_config import DEFAULT_S_GRID

    return list(DEFAULT_S_GRID)


@pytest.fixture
def random_s():
    """(0.01, 0.99) 구간의 고정 시드 s 50개"""
    from src.utils.random_streams import substream

    return [float(s) for s in substream(20240601, 7).uniform(0.01, 0.99, size=50)]
