"""
실험 불완전성 모델과 Monte Carlo 엔벨로프 테스트

불완전성 추출 분포, 불완전한 배치의 검출 확률, 엔벨로프의 포함/단조성/결정성을 검증합니다.
"""
import os
import sys

import numpy as np
import pytest
from scipy import stats

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.config.susd_config import ImperfectionConfig
from src.imperfections.model import (
    PerturbedSetup,
    perturbed_detector_probs,
    perturbed_tables,
    sample_imperfection,
)
from src.imperfections.montecarlo import mc_envelope, mc_success_envelope, sample_tables
from src.optics.jones import PBSParams
from src.optics.setup import PBS_NAMES, PLATE_NAMES
from src.protocol.engine import analytic_detector_probs
from src.quantum.states import Sign
from src.utils.error_handler import DegenerateSetupError
from src.utils.random_streams import make_rng

GRID = [0.0, 0.25, 0.7]
ZERO = ImperfectionConfig(hwp_jitter_max=0.0, pbs_loss_max=0.0, mode_mismatch_max=0.0, samples=20)


def _scaled(factor: float, samples: int = 200) -> ImperfectionConfig:
    default = ImperfectionConfig()
    return ImperfectionConfig(
        hwp_jitter_max=factor * default.hwp_jitter_max,
        pbs_loss_max=factor * default.pbs_loss_max,
        mode_mismatch_max=factor * default.mode_mismatch_max,
        samples=samples,
    )


class TestSampleImperfection:
    """불완전성 추출"""

    def test_zero_maxima_is_ideal(self):
        setup = sample_imperfection(ZERO, make_rng(1))
        assert setup.is_ideal
        assert setup == PerturbedSetup.ideal()

    def test_draws_within_bounds(self):
        cfg = ImperfectionConfig()
        rng = make_rng(2)
        for _ in range(200):
            assert sample_imperfection(cfg, rng).within(cfg)

    def test_offsets_uniform(self):
        """10⁴ 번 추출한 각도 오차가 U[-1°, 1°] 를 따름 (KS 검정 1%)"""
        cfg = ImperfectionConfig()
        rng = make_rng(3)
        offsets = [sample_imperfection(cfg, rng).hwp_offsets["I2.ccw"] for _ in range(10_000)]
        assert stats.kstest(offsets, "uniform", args=(-1.0, 2.0)).pvalue > 0.01

    def test_reproducible(self):
        cfg = ImperfectionConfig()
        assert sample_imperfection(cfg, make_rng(9)) == sample_imperfection(cfg, make_rng(9))

    def test_corner_sampling(self):
        cfg = ImperfectionConfig(sampling="corners")
        setup = sample_imperfection(cfg, make_rng(4))
        assert all(abs(value) == cfg.hwp_jitter_max for value in setup.hwp_offsets.values())
        assert all(pbs.loss_h in (0.0, cfg.pbs_loss_max) for pbs in setup.pbs_losses.values())
        assert all(value in (0.0, cfg.mode_mismatch_max) for value in setup.mode_mismatch.values())


class TestPerturbedDetectorProbs:
    """불완전한 배치의 검출 확률"""

    def test_ideal_matches_analytic(self):
        for s in np.linspace(0.0, 1.0, 11):
            for sign in Sign:
                table, throughput = perturbed_detector_probs(float(s), sign, PerturbedSetup.ideal())
                assert np.max(np.abs(table - analytic_detector_probs(float(s), sign))) < 1e-12
                assert throughput == pytest.approx(1.0, abs=1e-12)

    def test_renormalized_table(self):
        rng = make_rng(5)
        cfg = ImperfectionConfig(pbs_loss_max=0.2, mode_mismatch_max=0.1, hwp_jitter_max=3.0)
        for _ in range(20):
            setup = sample_imperfection(cfg, rng)
            table, throughput = perturbed_detector_probs(0.4, Sign.PLUS, setup)
            assert abs(table.sum() - 1.0) < 1e-12
            assert 0.0 < throughput <= 1.0 + 1e-12
            assert np.all(table >= 0.0)

    def test_jitter_breaks_unambiguity(self):
        """최대 각도 오차에서는 |ψ-⟩ 의 k=+ 열이 0 이 아님"""
        setup = PerturbedSetup(hwp_offsets={name: 1.0 for name in PLATE_NAMES})
        table, _ = perturbed_detector_probs(0.25, Sign.MINUS, setup)
        assert table[:, 0].sum() > 1e-6

    def test_total_loss_is_degenerate(self):
        setup = PerturbedSetup(pbs_losses={name: PBSParams(loss_h=1.0, loss_v=1.0) for name in PBS_NAMES})
        with pytest.raises(DegenerateSetupError) as exc_info:
            perturbed_tables(0.3, (Sign.PLUS,), setup)
        assert exc_info.value.throughput == pytest.approx(0.0)


class TestEnvelope:
    """Monte Carlo 엔벨로프"""

    def test_zero_imperfection_collapses(self):
        envelope = mc_envelope(GRID, Sign.MINUS, ZERO, seed=1)
        assert np.allclose(envelope.minimum, envelope.ideal, atol=1e-12)
        assert np.allclose(envelope.maximum, envelope.ideal, atol=1e-12)
        assert np.allclose(envelope.width(), 0.0, atol=1e-12)

    def test_contains_ideal_and_ordered(self):
        envelope = mc_envelope(GRID, Sign.MINUS, _scaled(1.0), seed=7)
        assert envelope.contains_ideal(1e-12)
        assert np.all(envelope.minimum <= envelope.mean) and np.all(envelope.mean <= envelope.maximum)
        assert np.all(envelope.minimum >= -1e-12) and np.all(envelope.maximum <= 1.0 + 1e-12)

    def test_interior_width_positive(self):
        envelope = mc_envelope([0.1, 0.5, 0.9], Sign.PLUS, _scaled(1.0), seed=8)
        for g in range(3):
            assert envelope.width()[g].max() > 0.0
            assert envelope.p_succ_width()[g] > 0.0

    def test_success_at_zero_bounded_by_one(self):
        envelope = mc_success_envelope(GRID, _scaled(1.0), seed=3)
        assert envelope.p_succ_max[0] == pytest.approx(1.0, abs=1e-12)
        assert envelope.p_succ_max[0] <= 1.0 + 1e-12
        assert envelope.sign is None

    def test_width_monotone_in_bounds(self):
        """0, 0.5, 1 배 사다리에서 폭이 줄지 않음"""
        widths = [mc_envelope(GRID, Sign.MINUS, _scaled(f), seed=11).width().sum(axis=(1, 2)) for f in (0.0, 0.5, 1.0)]
        assert np.all(widths[0] <= widths[1] + 1e-12)
        assert np.all(widths[1] <= widths[2] + 1e-12)

    @pytest.mark.parametrize("bound", ["hwp_jitter_max", "pbs_loss_max", "mode_mismatch_max"])
    def test_width_monotone_per_bound(self, bound):
        """한 파라미터만 0, 0.5, 1 배로 키우고 나머지는 0 일 때 폭이 줄지 않음"""
        nominal = getattr(ImperfectionConfig(), bound)
        widths = []
        for factor in (0.0, 0.5, 1.0):
            cfg = ZERO.model_copy(update={bound: factor * nominal, "samples": 200})
            widths.append(mc_envelope(GRID, Sign.MINUS, cfg, seed=11).width().sum(axis=(1, 2)))
        assert np.allclose(widths[0], 0.0, atol=1e-12)
        assert np.all(widths[0] <= widths[1] + 1e-12)
        assert np.all(widths[1] <= widths[2] + 1e-12)
        assert widths[2].max() > widths[0].max()

    def test_nominal_sample_first(self):
        """샘플 0 은 공칭 배치라서 해석 표와 같고, 추출한 배치는 모두 공칭에서 벗어남"""
        samples = sample_tables(GRID, _scaled(1.0, samples=50), seed=7)
        for g, s in enumerate(GRID):
            for i, sign in enumerate((Sign.PLUS, Sign.MINUS)):
                assert np.max(np.abs(samples.tables[0, g, i] - analytic_detector_probs(s, sign))) < 1e-12
        draws = samples.tables[1:, 1, 1]
        deviation = np.abs(draws - analytic_detector_probs(0.25, Sign.MINUS)).max(axis=(1, 2))
        assert np.all(deviation > 0.0)

    def test_random_draws_leak_into_zero_column(self):
        """추출한 배치만으로는 |ψ-⟩ 의 k=+ 열(이상값 0)에 닿지 않으므로 하한은 공칭 샘플이 정함"""
        samples = sample_tables([0.25], _scaled(1.0, samples=200), seed=7)
        leak = samples.tables[1:, 0, 1, :, 0].sum(axis=1)
        assert leak.min() > 0.0
        envelope = samples.envelope(Sign.MINUS)
        assert np.allclose(envelope.minimum[0, :, 0], 0.0, atol=1e-12)
        assert envelope.contains_ideal(1e-12)

    def test_mean_excludes_nominal(self):
        samples = sample_tables(GRID, _scaled(1.0, samples=50), seed=5)
        envelope = samples.envelope(Sign.MINUS)
        draws = samples.tables[1:, :, 1]
        expected = np.clip(draws.mean(axis=0), envelope.minimum, envelope.maximum)
        assert np.allclose(envelope.mean, expected, atol=1e-15)
        assert np.allclose(envelope.throughput_mean, samples.throughput[1:, :, 1].mean(axis=0), atol=1e-15)

    def test_deterministic_and_worker_independent(self):
        cfg = _scaled(1.0, samples=300)
        serial = sample_tables(GRID, cfg, seed=42, workers=1)
        parallel = sample_tables(GRID, cfg, seed=42, workers=2)
        assert np.array_equal(serial.tables, parallel.tables)
        assert np.array_equal(serial.throughput, parallel.throughput)

    def test_generator_seed(self):
        first = mc_envelope(GRID, Sign.PLUS, _scaled(1.0, 30), make_rng(6))
        second = mc_envelope(GRID, Sign.PLUS, _scaled(1.0, 30), make_rng(6))
        assert np.array_equal(first.maximum, second.maximum)

    def test_percentile_statistic(self):
        cfg = ImperfectionConfig(samples=200, statistic="percentile")
        envelope = mc_envelope(GRID, Sign.MINUS, cfg, seed=2)
        assert envelope.statistic == "percentile"
        assert np.all(envelope.minimum <= envelope.maximum)
        assert set(envelope.to_dict()) >= {"min", "max", "p_succ_min", "throughput_min"}

    @pytest.mark.slow
    def test_full_size_containment(self):
        envelope = mc_envelope([0.25], Sign.MINUS, ImperfectionConfig(), seed=2025)
        assert envelope.samples == 10_000
        assert envelope.contains_ideal(1e-12)
