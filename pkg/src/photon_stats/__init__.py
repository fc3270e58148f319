"""
광자 계수 통계 모듈

검출 확률을 런별 Poisson 카운트로 바꾸고, 카운트로부터 확률과 오차 막대를 다시 추정합니다.
"""

from .counting import (
    CountData,
    ProbabilityEstimate,
    SuccessEstimate,
    estimate_probs,
    estimate_success,
    expected_counts,
    simulate_counts,
)

__all__ = [
    "CountData",
    "ProbabilityEstimate",
    "SuccessEstimate",
    "estimate_probs",
    "estimate_success",
    "expected_counts",
    "simulate_counts",
]
