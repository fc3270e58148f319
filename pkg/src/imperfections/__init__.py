"""
실험 불완전성 Monte Carlo 모듈

HWP 각도 오차, PBS 손실, 모드 불일치를 샘플링하여 검출 확률 엔벨로프를 계산합니다.
"""

from .model import PerturbedSetup, perturbed_detector_probs, perturbed_tables, sample_imperfection
from .montecarlo import EnvelopeResult, MonteCarloSamples, mc_envelope, mc_success_envelope, sample_tables

__all__ = [
    "EnvelopeResult",
    "MonteCarloSamples",
    "PerturbedSetup",
    "mc_envelope",
    "mc_success_envelope",
    "perturbed_detector_probs",
    "perturbed_tables",
    "sample_imperfection",
    "sample_tables",
]
