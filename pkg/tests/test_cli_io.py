"""
결과 번들 직렬화와 파일 출력 테스트
"""
import json
import os
import sys


ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src import __version__
from src.cli.io import (
    CHECK_COLUMNS,
    DETECTOR_COLUMNS,
    SUCCESS_COLUMNS,
    BundleMetadata,
    CheckResult,
    DetectorRow,
    ResultBundle,
    SuccessRow,
    atomic_write,
    format_number,
    render,
    round15,
    success_path,
    write_bundle,
)


def _bundle() -> ResultBundle:
    bundle = ResultBundle(metadata=BundleMetadata(command="analytic", seed=3, config_hash="abc", s_grid_source="user"))
    bundle.detectors.append(DetectorRow(s=0.25, state="-", mu=4, k="-", p_analytic=0.25, p_mean=0.2512345678901234567))
    bundle.success.append(SuccessRow(s=0.25, p_succ_analytic=0.25))
    return bundle


class TestNumbers:
    def test_round15(self):
        assert round15(0.1 + 0.2) == 0.3
        assert round15(None) is None
        assert round15(float("nan")) is None
        assert round15(float("inf")) is None

    def test_format_number(self):
        assert format_number(None) == ""
        assert format_number(0.25) == "0.25"
        assert format_number(1 / 3) == "0.333333333333333"
        assert format_number(float("nan")) == ""
        assert format_number(float("-inf")) == ""


class TestBundle:
    """CSV/JSON 출력"""

    def test_detector_csv(self):
        lines = _bundle().detector_csv().splitlines()
        assert lines[0] == ",".join(DETECTOR_COLUMNS)
        assert lines[1].split(",")[:5] == ["0.25", "-", "4", "-", "0.25"]
        assert lines[1].endswith(",,,")

    def test_success_csv(self):
        lines = _bundle().success_csv().splitlines()
        assert lines[0] == ",".join(SUCCESS_COLUMNS)
        assert lines[1] == "0.25,0.25,,,,"

    def test_json_matches_csv_precision(self):
        data = json.loads(_bundle().to_json())
        assert data["metadata"]["version"] == __version__
        assert data["metadata"]["s_grid_source"] == "user"
        p_mean = data["detectors"][0]["p_mean"]
        assert format_number(p_mean) == _bundle().detector_csv().splitlines()[1].split(",")[5]

    def test_non_finite_values_become_null(self):
        """정의되지 않는 추정치는 JSON null, CSV 빈 칸"""
        bundle = _bundle()
        bundle.success.append(SuccessRow(s=0.1, p_succ_analytic=0.9, p_succ_mean=float("nan"), p_succ_std=float("nan")))
        text = bundle.to_json()

        def reject(token):
            raise ValueError(f"non-standard JSON constant {token}")

        data = json.loads(text, parse_constant=reject)
        assert data["success"][1]["p_succ_mean"] is None
        assert data["success"][1]["p_succ_std"] is None
        assert bundle.success_csv().splitlines()[2] == "0.1,0.9,,,,"

    def test_checks_csv(self):
        bundle = _bundle()
        bundle.checks.append(CheckResult(name="completeness", deviation=1e-16, tolerance=1e-12, passed=True))
        bundle.checks.append(CheckResult(name="unambiguity", deviation=0.5, tolerance=1e-24, passed=False))
        lines = bundle.checks_csv().splitlines()
        assert lines[0] == ",".join(CHECK_COLUMNS)
        assert lines[1] == "completeness,1e-16,1e-12,true"
        assert lines[2].endswith(",false")
        assert not bundle.passed
        assert render(bundle, "csv") == {"main": bundle.checks_csv()}


class TestWriting:
    """원자적 파일 쓰기"""

    def test_atomic_write_leaves_no_temp_files(self, tmp_path):
        target = tmp_path / "nested" / "out.csv"
        atomic_write(target, "a,b\n")
        atomic_write(target, "c,d\n")
        assert target.read_text(encoding="utf-8") == "c,d\n"
        assert [p.name for p in target.parent.iterdir()] == ["out.csv"]

    def test_success_path(self):
        assert success_path("results/detectors.csv").name == "detectors_success.csv"

    def test_write_csv_pair(self, tmp_path):
        written = write_bundle(_bundle(), "csv", str(tmp_path / "detectors.csv"))
        assert [p.name for p in written] == ["detectors.csv", "detectors_success.csv"]
        assert (tmp_path / "detectors_success.csv").read_text(encoding="utf-8").startswith("s,p_succ_analytic")

    def test_write_json(self, tmp_path):
        written = write_bundle(_bundle(), "json", str(tmp_path / "simulate.json"))
        assert len(written) == 1
        assert json.loads(written[0].read_text(encoding="utf-8"))["metadata"]["seed"] == 3

    def test_stdout(self, capsys):
        assert write_bundle(_bundle(), "csv") == []
        out = capsys.readouterr().out
        assert out.startswith(",".join(DETECTOR_COLUMNS))
        assert "s,p_succ_analytic" in out

    def test_byte_identical_rewrites(self, tmp_path):
        first = write_bundle(_bundle(), "json", str(tmp_path / "a.json"))[0].read_bytes()
        second = write_bundle(_bundle(), "json", str(tmp_path / "b.json"))[0].read_bytes()
        assert first == second
