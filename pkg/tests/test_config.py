"""
설정 모델 테스트

RunConfig/SessionConfig 기본값, JSON 로드와 거부 규칙, 환경 변수 시드, 설정 해시를 검증합니다.
"""
import json
import os
import sys

import pytest

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.config.susd_config import DEFAULT_S_GRID, AlicePolicy, ImperfectionConfig, RunConfig, SessionConfig, SourceConfig
from src.protocol.models import PortMapping
from src.utils.error_handler import ConfigurationError


class TestDefaults:
    """기본값"""

    def test_run_defaults(self, monkeypatch):
        monkeypatch.delenv("SUSD_SEED", raising=False)
        cfg = RunConfig()
        assert cfg.s_grid == DEFAULT_S_GRID
        assert len(cfg.s_grid) == 7
        assert cfg.s_grid_source == "illustrative default"
        assert cfg.trials == 1_000_000
        assert cfg.seed == 0
        assert cfg.format == "csv"
        assert cfg.mapping == PortMapping.canonical()

    def test_source_defaults(self):
        src = SourceConfig()
        assert (src.coincidence_rate, src.accidental_rate, src.detector_efficiency) == (2600.0, 15.0, 0.60)
        assert (src.integration_time, src.runs) == (15.0, 45)

    def test_imperfection_defaults(self):
        cfg = ImperfectionConfig()
        assert (cfg.hwp_jitter_max, cfg.pbs_loss_max, cfg.mode_mismatch_max) == (1.0, 0.03, 0.03)
        assert cfg.samples == 10_000
        assert not cfg.is_ideal
        assert ImperfectionConfig(hwp_jitter_max=0, pbs_loss_max=0, mode_mismatch_max=0).is_ideal

    def test_session_from_run(self):
        cfg = RunConfig(trials=500, alice_policy=AlicePolicy.FIXED_MINUS, seed=3)
        session = cfg.session_config(0.4)
        assert isinstance(session, SessionConfig)
        assert (session.s, session.trials, session.seed) == (0.4, 500, 3)
        assert session.alice_policy is AlicePolicy.FIXED_MINUS
        assert cfg.session_config(0.4, seed=9).seed == 9


class TestEnvironmentSeed:
    """SUSD_SEED 대체 시드"""

    def test_env_seed_used(self, monkeypatch):
        monkeypatch.setenv("SUSD_SEED", "42")
        assert RunConfig().seed == 42
        assert SessionConfig(s=0.5).seed == 42

    def test_explicit_seed_wins(self, monkeypatch):
        monkeypatch.setenv("SUSD_SEED", "42")
        assert RunConfig(seed=7).seed == 7

    def test_invalid_env_seed(self, monkeypatch):
        monkeypatch.setenv("SUSD_SEED", "not-a-number")
        with pytest.raises(ConfigurationError):
            RunConfig()


class TestLoading:
    """JSON 로드와 검증"""

    def test_user_grid_labeled(self):
        cfg = RunConfig.from_dict({"s_grid": [0.1, 0.2]})
        assert cfg.s_grid_source == "user"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({"trails": 10})

    def test_nested_unknown_key_rejected(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({"source": {"rate": 1.0}})

    @pytest.mark.parametrize("grid", [[], [1.2], [-0.1, 0.5]])
    def test_invalid_grid(self, grid):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({"s_grid": grid})

    def test_seed_range(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({"seed": 2**64})

    def test_from_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(
            json.dumps({"s_grid": [0.25], "trials": 1000, "imperfection": {"samples": 50}, "format": "json"}),
            encoding="utf-8",
        )
        cfg = RunConfig.from_file(path)
        assert cfg.s_grid == [0.25]
        assert cfg.imperfection.samples == 50
        assert cfg.format == "json"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            RunConfig.from_file(tmp_path / "missing.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            RunConfig.from_file(path)

    def test_dump_round_trip_with_mapping(self):
        cfg = RunConfig(mapping=PortMapping.from_permutations(3, (1, 4, 2)), seed=5)
        again = RunConfig.from_dict(cfg.model_dump(mode="json"))
        assert again.mapping == cfg.mapping
        assert again.config_hash() == cfg.config_hash()

    def test_non_bijective_mapping_rejected(self):
        data = RunConfig(seed=1).model_dump(mode="json")
        data["mapping"]["bob"]["inconclusive"] = 3
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict(data)


class TestConfigHash:
    """재현용 설정 해시"""

    def test_ignores_workers_and_output(self):
        base = RunConfig(seed=1, workers=1)
        other = RunConfig(seed=1, workers=4, output="out.csv")
        assert base.config_hash() == other.config_hash()

    def test_changes_with_seed(self):
        assert RunConfig(seed=1).config_hash() != RunConfig(seed=2).config_hash()

    def test_canonical_json_sorted(self):
        data = json.loads(RunConfig(seed=1).canonical_json())
        assert "workers" not in data and "output" not in data
        assert list(data) == sorted(data)


class TestBundledConfigs:
    """configs/ 예제 파일"""

    @pytest.mark.parametrize("name", ["simulate.json", "mc.json", "fault_bob_cw.json"])
    def test_loads(self, name):
        cfg = RunConfig.from_file(os.path.join(ROOT, "configs", name))
        assert cfg.seed >= 0

    def test_fault_config(self):
        cfg = RunConfig.from_file(os.path.join(ROOT, "configs", "fault_bob_cw.json"))
        assert cfg.fault_injection == {"I1.cw": 5.0}
        assert cfg.s_grid_source == "user"
