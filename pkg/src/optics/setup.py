"""
전체 광학 배치 컴파일

I1 (Bob) → 판독 HWP+PBS → 재준비 HWP → I2-I4 (Charlie) → 판독 HWP+PBS 를 거쳐
Alice 의 편광 상태를 9 개 검출기 경로로 보내는 전달 사상을 구성합니다.

구성 요소 이름:
    HWP  alice, I1.cw, I1.ccw, I1.readout, rep.plus, rep.minus, I{2,3,4}.{cw,ccw,readout}
    PBS  I1, I1.readout, I{2,3,4}, I{2,3,4}.readout
    모드 불일치  I1, I2, I3, I4

모드 불일치 ε 는 Sagnac 출력 포트의 세기 중 ε 만큼이 반대 포트의 모드에서 오는 것으로 모델링하며,
두 기여는 서로 간섭하지 않습니다. 따라서 일반적인 경우 각 검출기는 (가중치, 2×2 블록) 분기 목록을 가집니다.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.optics.jones import (
    IDEAL_PBS,
    PBSParams,
    SagnacConfig,
    hwp_jones,
    nominal_plate_angles,
    readout_split,
    sagnac_ports,
)
from src.protocol.models import DETECTORS, MU_VALUES, KLabel, PortMapping, detector_index
from src.quantum.measurements import OUTCOME_ORDER, OutcomeLabel, bob_usd, charlie_usd
from src.quantum.states import DIAG_MINUS, DIAG_PLUS, Operator2, PolarizationState, Sign, prepare_phi
from src.utils.error_handler import ConfigurationError, UnknownPortError, require_unit_interval

INTERFEROMETERS: Tuple[str, ...] = ("I1", "I2", "I3", "I4")
CHARLIE_INTERFEROMETER: Dict[int, str] = {mu: f"I{mu}" for mu in MU_VALUES}

PLATE_NAMES: Tuple[str, ...] = (
    "alice",
    "I1.cw",
    "I1.ccw",
    "I1.readout",
    "rep.plus",
    "rep.minus",
    *(f"{name}.{part}" for name in INTERFEROMETERS[1:] for part in ("cw", "ccw", "readout")),
)
PBS_NAMES: Tuple[str, ...] = tuple(name for base in INTERFEROMETERS for name in (base, f"{base}.readout"))

Branch = Tuple[float, Operator2]
Detector = Tuple[int, KLabel]

PBSInput = Union[Mapping[str, PBSParams], Sequence[PBSParams], None]


def _check_names(values: Optional[Mapping[str, object]], allowed: Sequence[str], kind: str) -> Dict[str, object]:
    values = dict(values or {})
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise ConfigurationError(f"Unknown {kind} name(s) {unknown}; expected one of {list(allowed)}", config_key=kind)
    return values


def _pbs_table(pbs: PBSInput) -> Dict[str, PBSParams]:
    if pbs is None:
        return {name: IDEAL_PBS for name in PBS_NAMES}
    if isinstance(pbs, Mapping):
        table = _check_names(pbs, PBS_NAMES, "pbs")
        return {name: table.get(name, IDEAL_PBS) for name in PBS_NAMES}
    pbs = list(pbs)
    if len(pbs) != len(PBS_NAMES):
        raise ConfigurationError(f"Expected {len(PBS_NAMES)} PBS parameter sets, got {len(pbs)}", config_key="pbs")
    return dict(zip(PBS_NAMES, pbs))


def _port_branches(ports: Tuple[Operator2, Operator2], mismatch: float) -> Dict[str, List[Branch]]:
    """Sagnac 출력 포트별 비간섭 분기"""
    port_b0, port_b1 = ports
    branches = {
        "b0": [(1.0 - mismatch, port_b0), (mismatch, port_b1)],
        "b1": [(1.0 - mismatch, port_b1), (mismatch, port_b0)],
    }
    return {port: [(w, block) for w, block in items if w > 0.0] for port, items in branches.items()}


def _stage_outputs(
    cfg: SagnacConfig,
    readout_theta: float,
    pbs: PBSParams,
    readout_pbs: PBSParams,
    mismatch: float,
) -> Dict[OutcomeLabel, List[Branch]]:
    """USD 한 단계: 결정적 포트는 판독 HWP+PBS 로 ± 경로, 비결정적 포트는 그대로"""
    ports = _port_branches(sagnac_ports(cfg, pbs), mismatch)
    transmitted, reflected = readout_split(readout_theta, readout_pbs)
    return {
        OutcomeLabel.CONCLUSIVE_PLUS: [(w, transmitted @ block) for w, block in ports["b0"]],
        OutcomeLabel.CONCLUSIVE_MINUS: [(w, reflected @ block) for w, block in ports["b0"]],
        OutcomeLabel.INCONCLUSIVE: ports["b1"],
    }


def network_branches(
    s: float,
    mapping: Optional[PortMapping] = None,
    pbs: PBSInput = None,
    hwp_offsets: Optional[Mapping[str, float]] = None,
    mode_mismatch: Optional[Mapping[str, float]] = None,
) -> Dict[Detector, List[Branch]]:
    """
    검출기별 (가중치, 블록) 분기 목록

    검출 확률은 Σ 가중치·‖블록 ψ‖² 입니다. hwp_offsets 는 도 단위 각도 오차이며
    'alice' 판 오차는 입력 상태 쪽에서 적용하므로 여기서는 쓰지 않습니다.

    Raises:
        ConfigurationError: 알 수 없는 구성 요소 이름
    """
    mapping = mapping or PortMapping.canonical()
    pbs_params = _pbs_table(pbs)
    offsets = _check_names(hwp_offsets, PLATE_NAMES, "hwp")
    mismatch = _check_names(mode_mismatch, INTERFEROMETERS, "mode_mismatch")
    for name, value in mismatch.items():
        require_unit_interval(f"mode_mismatch[{name}]", float(value))

    def plate(name: str, nominal: float) -> float:
        return nominal + np.radians(float(offsets.get(name, 0.0)))

    angles = nominal_plate_angles(s)
    bob_cfg = angles.bob.perturbed(offsets.get("I1.cw", 0.0), offsets.get("I1.ccw", 0.0))
    bob = _stage_outputs(
        bob_cfg,
        plate("I1.readout", angles.readout),
        pbs_params["I1"],
        pbs_params["I1.readout"],
        float(mismatch.get("I1", 0.0)),
    )
    rep = {
        OutcomeLabel.CONCLUSIVE_PLUS: hwp_jones(plate("rep.plus", angles.rep_plus)),
        OutcomeLabel.CONCLUSIVE_MINUS: hwp_jones(plate("rep.minus", angles.rep_minus)),
        OutcomeLabel.INCONCLUSIVE: np.eye(2, dtype=complex),
    }

    result: Dict[Detector, List[Branch]] = {detector: [] for detector in DETECTORS}
    for bob_outcome, bob_branches in bob.items():
        mu = mapping.bob[bob_outcome]
        name = CHARLIE_INTERFEROMETER[mu]
        charlie_cfg = angles.charlie.perturbed(offsets.get(f"{name}.cw", 0.0), offsets.get(f"{name}.ccw", 0.0))
        charlie = _stage_outputs(
            charlie_cfg,
            plate(f"{name}.readout", angles.readout),
            pbs_params[name],
            pbs_params[f"{name}.readout"],
            float(mismatch.get(name, 0.0)),
        )
        for charlie_outcome, charlie_branches in charlie.items():
            detector = mapping.detector(bob_outcome, charlie_outcome)
            for w_bob, block_bob in bob_branches:
                for w_charlie, block_charlie in charlie_branches:
                    result[detector].append((w_bob * w_charlie, block_charlie @ rep[bob_outcome] @ block_bob))
    return result


def branch_detector_probs(branches: Mapping[Detector, List[Branch]], state: PolarizationState) -> np.ndarray:
    """분기 목록으로부터 (정규화하지 않은) 검출 확률 표"""
    vec = state.vector
    table = np.zeros((3, 3))
    for detector, items in branches.items():
        table[detector_index(*detector)] = sum(w * float(np.real(np.vdot(b @ vec, b @ vec))) for w, b in items)
    return table


@dataclass(frozen=True)
class SetupTransfer:
    """
    2 → 18 전달 행렬

    행 = 2·경로 인덱스 + 편광 (경로 순서는 labels, μ = 2, 3, 4 × k = +, -, i)
    """

    matrix: np.ndarray
    labels: Tuple[Detector, ...] = DETECTORS

    def block(self, mu: int, k: Union[KLabel, str]) -> Operator2:
        try:
            index = self.labels.index((int(mu), KLabel(k)))
        except ValueError as e:
            raise UnknownPortError(f"Unknown detector port ({mu}, {k})", port=(mu, k)) from e
        return self.matrix[2 * index: 2 * index + 2, :].copy()

    def output_amplitudes(self, state: PolarizationState) -> np.ndarray:
        return self.matrix @ state.vector

    def detector_probs(self, state: PolarizationState) -> np.ndarray:
        """|T ψ|² 를 검출기 표로 합산"""
        amplitudes = self.output_amplitudes(state)
        intensities = np.abs(amplitudes) ** 2
        table = np.zeros((3, 3))
        for index, detector in enumerate(self.labels):
            table[detector_index(*detector)] = intensities[2 * index] + intensities[2 * index + 1]
        return table

    def isometry_deviation(self) -> float:
        """‖T†T - I‖_max"""
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))))

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.matrix, axis=0)


def compile_setup(
    s: float,
    pbs_list: PBSInput = None,
    mapping: Optional[PortMapping] = None,
    hwp_offsets: Optional[Mapping[str, float]] = None,
) -> SetupTransfer:
    """모드 불일치가 없는 (간섭성) 배치의 전달 행렬"""
    branches = network_branches(s, mapping, pbs_list, hwp_offsets)
    rows = []
    for detector in DETECTORS:
        (weight, block), = branches[detector]
        rows.append(np.sqrt(weight) * block)
    return SetupTransfer(matrix=np.vstack(rows))


def transfer_to_kraus(t: Union[SetupTransfer, np.ndarray], port) -> Operator2:
    """
    전달 사상에서 포트 하나의 2×2 블록 추출

    4×4 Sagnac 전달 행렬은 포트 'b0' / 'b1', SetupTransfer 는 (μ, k) 를 받습니다.

    Raises:
        UnknownPortError: 존재하지 않는 포트
    """
    if isinstance(t, SetupTransfer):
        if not isinstance(port, tuple) or len(port) != 2:
            raise UnknownPortError(f"Setup ports are (mu, k) pairs, got {port!r}", port=port)
        try:
            return t.block(*port)
        except ValueError as e:
            raise UnknownPortError(f"Unknown detector port {port!r}", port=port) from e

    matrix = np.asarray(t)
    if matrix.shape != (4, 4):
        raise UnknownPortError(f"Expected a 4x4 transfer matrix, got shape {matrix.shape}", port=port)
    branch = {"b0": 0, "b1": 1}.get(port)
    if branch is None:
        raise UnknownPortError(f"Unknown Sagnac port {port!r}; expected 'b0' or 'b1'", port=port)
    return matrix[2 * branch: 2 * branch + 2, 0:2].copy()


def kraus_path_blocks(s: float, mapping: Optional[PortMapping] = None) -> Dict[Detector, Operator2]:
    """
    두 단계 Kraus 합성으로 얻는 경로별 기대 블록

        readout(c) · C_c · rep(b) · A_b

    결정적 결과에서 readout = H(π/8), rep = |φ±⟩⟨±|, 비결정적 결과에서는 둘 다 항등입니다.
    """
    mapping = mapping or PortMapping.canonical()
    bob = bob_usd(s)
    charlie = charlie_usd(s)
    readout = hwp_jones(np.pi / 8)
    rep = {
        OutcomeLabel.CONCLUSIVE_PLUS: np.outer(prepare_phi(s, Sign.PLUS).vector, DIAG_PLUS.vector.conj()),
        OutcomeLabel.CONCLUSIVE_MINUS: np.outer(prepare_phi(s, Sign.MINUS).vector, DIAG_MINUS.vector.conj()),
        OutcomeLabel.INCONCLUSIVE: np.eye(2, dtype=complex),
    }
    blocks = {}
    for bob_outcome in OUTCOME_ORDER:
        for charlie_outcome in OUTCOME_ORDER:
            out = readout if charlie_outcome.is_conclusive else np.eye(2, dtype=complex)
            blocks[mapping.detector(bob_outcome, charlie_outcome)] = (
                out @ charlie.operator(charlie_outcome) @ rep[bob_outcome] @ bob.operator(bob_outcome)
            )
    return blocks


def phase_aligned_distance(a: Operator2, b: Operator2) -> float:
    """전역 위상 하나를 맞춘 뒤의 Frobenius 거리"""
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if abs(inner) > 1e-15 else 1.0
    return float(np.linalg.norm(a - phase * b))

