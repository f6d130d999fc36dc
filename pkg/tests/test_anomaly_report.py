import math

import numpy as np
import pytest

from bellcount import (
    CHRISTENSEN_MODEL,
    CHRISTENSEN_SETTINGS,
    ExperimentRecord,
    SettingData,
    SinglesCount,
    anomaly_ratio,
    build_comparison,
    ch_statistic,
    empirical_ch,
    poisson_z_scores,
    quantum_setting_probabilities,
)
from bellcount.count_pipeline import SETTING_ORDER
from bellcount.errors import InvalidArgumentError, UndefinedDiagnosticError
from bellcount.experiment_sim import SimConfig, simulate_experiment

from conftest import TABLE_CORRECTED, TABLE_QUANTUM, TABLE_RAW


def record_with(raw, trials=None, reference=28_000_000):
    trials = trials or [reference] * 4
    return ExperimentRecord(
        angles=CHRISTENSEN_SETTINGS,
        settings=tuple(SettingData(a, b, t, c) for (a, b), t, c in zip(SETTING_ORDER, trials, raw)),
        reference_trials=reference,
    )


class TestPoissonZ:
    def test_table_values(self):
        z = poisson_z_scores([30008, 1867], [31419.3, 483.84])
        assert z[0] == pytest.approx(-7.96, abs=0.02)
        assert z[1] == pytest.approx(62.9, abs=0.1)

    @pytest.mark.parametrize("p", [1e-3, 1.0, 484.0, 1e7])
    def test_zero_at_prediction(self, p):
        assert poisson_z_scores([p], [p]) == [0.0]

    def test_non_positive_prediction(self):
        with pytest.raises(UndefinedDiagnosticError) as info:
            poisson_z_scores([1, 2, 3], [1.0, 0.0, 1.0])
        assert info.value.index == 1


class TestAnomalyRatio:
    def test_table_value(self):
        assert anomaly_ratio(1867, 483.84) == pytest.approx(3.86, abs=0.02)

    def test_identity_and_zero(self):
        assert anomaly_ratio(484.0, 484.0) == 1.0
        assert anomaly_ratio(0.0, 484.0) == 0.0

    @pytest.mark.parametrize("p", [0.0, -1.0])
    def test_undefined(self, p):
        with pytest.raises(UndefinedDiagnosticError):
            anomaly_ratio(1.0, p)


class TestBuildComparison:
    def test_published_fixture(self, christensen_record):
        table = build_comparison(christensen_record, CHRISTENSEN_MODEL)
        assert [r.raw for r in table.rows] == TABLE_RAW
        np.testing.assert_allclose([r.corrected for r in table.rows], TABLE_CORRECTED, atol=0.5)
        np.testing.assert_allclose([r.predicted for r in table.rows], TABLE_QUANTUM, atol=3)
        assert [r.label for r in table.rows] == ["a,b", "a,b'", "a',b", "a',b'"]
        assert table.rows[3].ratio == pytest.approx(3.86, abs=0.02)

    def test_self_consistent_counts(self):
        scale = 518_037
        q = quantum_setting_probabilities(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS)
        table = build_comparison(record_with([round(scale * x) for x in q]), CHRISTENSEN_MODEL)
        for row in table.rows:
            assert abs(row.z_score) <= 0.03
            assert row.ratio == pytest.approx(1.0, abs=0.002)

    def test_generated_exactly(self):
        q = quantum_setting_probabilities(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS)
        predicted = 1234.5 * q
        z = poisson_z_scores(predicted, predicted)
        assert max(abs(v) for v in z) <= 1e-9
        assert all(abs(anomaly_ratio(p, p) - 1) <= 1e-12 for p in predicted)

    def test_all_zero_counts(self):
        table = build_comparison(record_with([0, 0, 0, 0]), CHRISTENSEN_MODEL)
        assert table.scale == 0.0
        assert all(r.predicted == 0.0 for r in table.rows)
        assert all(r.ratio is None and r.z_score is None for r in table.rows)

    def test_deterministic(self, christensen_record):
        assert build_comparison(christensen_record, CHRISTENSEN_MODEL) == build_comparison(christensen_record, CHRISTENSEN_MODEL)
        assert not any(math.isinf(r.z_score) for r in build_comparison(christensen_record, CHRISTENSEN_MODEL).rows)


class TestEmpiricalCH:
    def test_matches_simulated_expectation(self):
        # expectation per trial is mu * J(eta1, eta2)
        cfg = SimConfig(
            model=CHRISTENSEN_MODEL, angles=CHRISTENSEN_SETTINGS, trials_per_setting=(4 * 10**6,) * 4,
            pair_probability=0.5, eta1=0.9, eta2=0.85, seed=3,
        )
        got = empirical_ch(simulate_experiment(cfg))
        expected = 0.5 * ch_statistic(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS, 0.9, 0.85)
        # per-trial std of the combination is below 0.5 for each of the six terms
        assert abs(got - expected) < 3 * 6 * 0.5 / math.sqrt(4e6)

    def test_hand_computed(self):
        rec = ExperimentRecord(
            angles=CHRISTENSEN_SETTINGS,
            settings=tuple(SettingData(a, b, 100, c) for (a, b), c in zip(SETTING_ORDER, [10, 20, 30, 5])),
            singles_alice=SinglesCount("a", 40),
            singles_bob=SinglesCount("b", 60),
        )
        assert empirical_ch(rec) == pytest.approx(0.10 + 0.20 + 0.30 - 0.05 - 40 / 200 - 60 / 200, abs=1e-15)

    def test_requires_singles(self):
        with pytest.raises(InvalidArgumentError):
            empirical_ch(record_with([1, 2, 3, 4]))
