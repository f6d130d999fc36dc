"""Exit criteria.  Each test carries an ``acceptance`` marker; a PASS/FAIL line
per criterion is printed in the pytest terminal summary."""

import time

import numpy as np
import pytest

from bellcount import (
    CHRISTENSEN_MODEL,
    CHRISTENSEN_SETTINGS,
    SimConfig,
    anomaly_ratio,
    build_comparison,
    ch_statistic,
    critical_efficiency,
    fit_scale,
    normalize_record,
    outcome_distribution,
    parse_experiment_file,
    predicted_counts,
    quantum_setting_probabilities,
    render_report,
    serialize_experiment,
    singles_probability,
    validate_pipeline,
    PairSourceModel,
)

from conftest import TABLE_CORRECTED, TABLE_QUANTUM, PUBLISHED_SCALE
from oracles import brute_force_scale, ch_hp, critical_eta_hp


@pytest.mark.acceptance(1, "quantum row 31419/33553/33553/484 within +-3 counts, < 1 s")
def test_quantum_row():
    start = time.perf_counter()
    q = quantum_setting_probabilities(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS)
    fit = fit_scale(TABLE_CORRECTED, q)
    predicted = predicted_counts(fit.scale, q)
    elapsed = time.perf_counter() - start
    assert np.all(np.abs(predicted - TABLE_QUANTUM) <= 3), predicted
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "fitted N*eta1*eta2 = 518,037 within 0.05%, < 1 s")
def test_scale_fit():
    start = time.perf_counter()
    fit = fit_scale(TABLE_CORRECTED, quantum_setting_probabilities(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS))
    elapsed = time.perf_counter() - start
    assert abs(fit.scale - PUBLISHED_SCALE) <= 5e-4 * PUBLISHED_SCALE
    assert elapsed < 1.0


@pytest.mark.acceptance(3, "anomaly ratio at (a',b') = 3.86 +- 0.02")
def test_anomaly_ratio(christensen_record):
    q = quantum_setting_probabilities(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS)
    fit = fit_scale(TABLE_CORRECTED, q)
    assert anomaly_ratio(TABLE_CORRECTED[3], fit.scale * q[3]) == pytest.approx(3.86, abs=0.02)
    table = build_comparison(christensen_record, CHRISTENSEN_MODEL)
    assert table.rows[3].ratio == pytest.approx(3.86, abs=0.02)


@pytest.mark.acceptance(4, "normalize_record reproduces 30008/33721/34687/1867 within +-0.5")
def test_normalization(christensen_record):
    got = list(normalize_record(christensen_record).values())
    assert np.all(np.abs(np.array(got) - TABLE_CORRECTED) <= 0.5), got


@pytest.mark.acceptance(5, "property suite: normalization, marginals, oracle fit, orthogonality")
def test_property_suite():
    rng = np.random.default_rng(5)
    for r, a, b in zip(rng.uniform(0, 2, 1000), rng.uniform(-180, 180, 1000), rng.uniform(-180, 180, 1000)):
        m = PairSourceModel(r)
        d = outcome_distribution(m, a, b)
        assert abs(d.total() - 1) <= 1e-12
        assert abs(d.p_pp + d.p_pm - singles_probability(m, a)) <= 1e-12
        assert abs(d.p_pp + d.p_mp - singles_probability(m, b)) <= 1e-12
    for _ in range(100):
        e = rng.uniform(0, 1e5, 4)
        q = rng.uniform(0, 1, 4)
        fit = fit_scale(e, q)
        oracle = brute_force_scale(e, q)
        assert abs(fit.scale - oracle) <= 1e-6 * abs(oracle)
        assert abs(np.dot(fit.q, fit.residuals)) <= 1e-6 * np.dot(fit.q, fit.e)


@pytest.mark.acceptance(6, "CH statistic 0.05494 +- 1e-4 and critical efficiency 0.7097 +- 5e-4")
def test_ch_diagnostics():
    angles = (3.8, -25.2, -3.8, 25.2)
    j = ch_statistic(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS, 1.0, 1.0)
    eta = critical_efficiency(CHRISTENSEN_MODEL, CHRISTENSEN_SETTINGS)
    assert j == pytest.approx(0.05494, abs=1e-4)
    assert eta == pytest.approx(0.7097, abs=5e-4)
    # independent 50-digit evaluation
    assert j == pytest.approx(float(ch_hp(0.26, *angles)), abs=1e-12)
    assert eta == pytest.approx(float(critical_eta_hp(0.26, *angles)), abs=1e-12)


@pytest.mark.acceptance(7, "simulator recovers scale within 3 SE; anomaly x4 gives ratio 4 +- 3 SE; < 60 s")
def test_simulator_consistency():
    common = dict(
        model=CHRISTENSEN_MODEL,
        angles=CHRISTENSEN_SETTINGS,
        trials_per_setting=(10**6,) * 4,
        pair_probability=0.0185,
        eta1=1.0,
        eta2=1.0,
        reference_trials=10**6,
    )
    start = time.perf_counter()
    null = validate_pipeline(SimConfig(seed=1, **common), 50)
    boosted = validate_pipeline(SimConfig(seed=2, anomaly_multiplier=4.0, **common), 50)
    elapsed = time.perf_counter() - start
    assert null.true_scale == pytest.approx(18_500)
    assert abs(null.mean_scale - null.true_scale) < 3 * null.standard_error
    assert abs(boosted.mean_ratio[3] - 4.0) < 3 * boosted.ratio_standard_error[3]
    assert elapsed < 60.0


@pytest.mark.acceptance(8, "parse -> serialize -> parse identity; byte-deterministic reports")
def test_io_round_trip(christensen_record):
    again = parse_experiment_file(serialize_experiment(christensen_record))
    assert again == christensen_record
    assert serialize_experiment(again) == serialize_experiment(christensen_record)
    table = build_comparison(christensen_record, CHRISTENSEN_MODEL)
    for fmt in ("text", "csv", "json"):
        assert render_report(table, fmt) == render_report(build_comparison(again, CHRISTENSEN_MODEL), fmt)
