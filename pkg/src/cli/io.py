"""
결과 번들과 파일 출력

CSV 와 JSON 은 같은 숫자(유효숫자 15 자리)를 담으며, 파일은 임시 파일에 쓴 뒤 이름을 바꿔 원자적으로 교체합니다.

CSV 구성:
    검출기 표  s,state,mu,k,p_analytic,p_mean,p_std,p_env_min,p_env_max
    성공 확률 표  s,p_succ_analytic,p_succ_mean,p_succ_std,p_succ_env_min,p_succ_env_max
    검증 보고서  check,deviation,tolerance,passed

--out 경로에는 검출기 표(검증 명령이면 보고서)를 쓰고, 성공 확률 표는 같은 위치의 `<이름>_success.csv` 에 씁니다.
"""

from __future__ import annotations

import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional

from pydantic import BaseModel, Field, PlainSerializer

from src import __version__

DETECTOR_COLUMNS = ("s", "state", "mu", "k", "p_analytic", "p_mean", "p_std", "p_env_min", "p_env_max")
SUCCESS_COLUMNS = ("s", "p_succ_analytic", "p_succ_mean", "p_succ_std", "p_succ_env_min", "p_succ_env_max")
CHECK_COLUMNS = ("check", "deviation", "tolerance", "passed")


def round15(value: Optional[float]) -> Optional[float]:
    """유효숫자 15 자리로 반올림 (CSV 텍스트와 같은 값). NaN/±inf 는 None (JSON null)."""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.15g}")


def format_number(value: Optional[float]) -> str:
    """CSV 숫자 표기. 값이 없거나 유한하지 않으면 빈 칸."""
    value = round15(value)
    if value is None:
        return ""
    return f"{value:.15g}"


Num = Annotated[float, PlainSerializer(round15, return_type=Optional[float])]


class DetectorRow(BaseModel):
    s: Num
    state: str
    mu: int
    k: str
    p_analytic: Num
    p_mean: Optional[Num] = None
    p_std: Optional[Num] = None
    p_env_min: Optional[Num] = None
    p_env_max: Optional[Num] = None
    p_env_mean: Optional[Num] = None
    p_mean_raw: Optional[Num] = None
    p_std_raw: Optional[Num] = None


class SuccessRow(BaseModel):
    s: Num
    p_succ_analytic: Num
    p_succ_mean: Optional[Num] = None
    p_succ_std: Optional[Num] = None
    p_succ_env_min: Optional[Num] = None
    p_succ_env_max: Optional[Num] = None
    p_succ_env_mean: Optional[Num] = None
    p_succ_session: Optional[Num] = None
    p_succ_session_std: Optional[Num] = None
    conclusive_errors: Optional[int] = None


class CheckResult(BaseModel):
    """검증 항목 하나"""

    name: str
    deviation: Num
    tolerance: Num
    passed: bool
    detail: str = ""

    def failed(self) -> bool:
        return not self.passed


class BundleMetadata(BaseModel):
    command: str
    seed: int
    config_hash: str
    version: str = __version__
    s_grid_source: str
    config: Dict[str, Any] = Field(default_factory=dict)


class ResultBundle(BaseModel):
    """자기 기술적인 결과 묶음 (설정과 시드로부터 그대로 재생성 가능)"""

    metadata: BundleMetadata
    detectors: List[DetectorRow] = Field(default_factory=list)
    success: List[SuccessRow] = Field(default_factory=list)
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_json(self) -> str:
        payload = self.model_dump(mode="json")
        return json.dumps(payload, indent=2, sort_keys=False, ensure_ascii=False, allow_nan=False) + "\n"

    def detector_csv(self) -> str:
        lines = [",".join(DETECTOR_COLUMNS)]
        for row in self.detectors:
            lines.append(
                ",".join(
                    [
                        format_number(row.s),
                        row.state,
                        str(row.mu),
                        row.k,
                        format_number(row.p_analytic),
                        format_number(row.p_mean),
                        format_number(row.p_std),
                        format_number(row.p_env_min),
                        format_number(row.p_env_max),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def success_csv(self) -> str:
        lines = [",".join(SUCCESS_COLUMNS)]
        for row in self.success:
            lines.append(
                ",".join(
                    format_number(getattr(row, column)) for column in SUCCESS_COLUMNS
                )
            )
        return "\n".join(lines) + "\n"

    def checks_csv(self) -> str:
        lines = [",".join(CHECK_COLUMNS)]
        for check in self.checks:
            lines.append(
                ",".join(
                    [check.name, format_number(check.deviation), format_number(check.tolerance), str(check.passed).lower()]
                )
            )
        return "\n".join(lines) + "\n"


def atomic_write(path: str | Path, text: str) -> Path:
    """임시 파일에 쓴 뒤 os.replace 로 교체 (LF 줄바꿈 유지)"""
    full_path = Path(path).resolve()
    full_path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = None
    try:
        with tempfile.NamedTemporaryFile(
            "w", delete=False, dir=full_path.parent, encoding="utf-8", newline="\n", suffix=".tmp"
        ) as f:
            tmp_path = f.name
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, full_path)
    finally:
        if tmp_path and os.path.exists(tmp_path):
            os.unlink(tmp_path)
    return full_path


def success_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}_success.csv")


def render(bundle: ResultBundle, fmt: str) -> Dict[str, str]:
    """출력 이름 → 텍스트 ('main' 과 선택적 'success')"""
    if fmt == "json":
        return {"main": bundle.to_json()}
    if bundle.checks:
        return {"main": bundle.checks_csv()}
    return {"main": bundle.detector_csv(), "success": bundle.success_csv()}


def write_bundle(bundle: ResultBundle, fmt: str, out: Optional[str] = None) -> List[Path]:
    """번들을 파일 (또는 out 이 없으면 stdout) 에 기록"""
    outputs = render(bundle, fmt)
    if out is None:
        sys.stdout.write("\n".join(outputs.values()))
        sys.stdout.flush()
        return []

    written = [atomic_write(out, outputs["main"])]
    if "success" in outputs:
        written.append(atomic_write(success_path(out), outputs["success"]))
    return written
