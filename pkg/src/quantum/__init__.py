"""
양자 상태와 일반화 측정

편광 큐비트 상태, USD Kraus 집합, Neumark 확장을 제공합니다.
"""

from .measurements import (
    OUTCOME_ORDER,
    KrausSet,
    MeasurementResult,
    OutcomeLabel,
    apply,
    bob_usd,
    charlie_usd,
    optimal_usd,
    outcome_distribution,
    povm_elements,
    verify_completeness,
)
from .neumark import NeumarkUnitary, kraus_from_dilation, kraus_set_from_dilation, neumark_dilation
from .states import PolarizationState, Sign, prepare_alice, prepare_phi

__all__ = [
    "OUTCOME_ORDER",
    "KrausSet",
    "MeasurementResult",
    "NeumarkUnitary",
    "OutcomeLabel",
    "PolarizationState",
    "Sign",
    "apply",
    "bob_usd",
    "charlie_usd",
    "kraus_from_dilation",
    "kraus_set_from_dilation",
    "neumark_dilation",
    "optimal_usd",
    "outcome_distribution",
    "povm_elements",
    "prepare_alice",
    "prepare_phi",
    "verify_completeness",
]
