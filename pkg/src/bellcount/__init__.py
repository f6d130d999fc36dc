"""Quantum predictions and count analysis for photon-pair Bell tests."""

__version__ = "0.1.0"

from .anomaly_report import (
    ComparisonRow,
    ComparisonTable,
    anomaly_ratio,
    build_comparison,
    empirical_ch,
    poisson_z_scores,
)
from .count_pipeline import (
    DEFAULT_REFERENCE_TRIALS,
    ExperimentRecord,
    ScaleFit,
    SettingData,
    SinglesCount,
    fit_scale,
    normalize_count,
    normalize_record,
    predicted_counts,
    quantum_setting_probabilities,
)
from .experiment_sim import RecoveryStats, SimConfig, simulate_experiment, validate_pipeline
from .fileio import load_bundled, parse_experiment_file, parse_sim_config, render_report, serialize_experiment
from .quantum_model import (
    CHRISTENSEN_MODEL,
    CHRISTENSEN_SETTINGS,
    OutcomeDistribution,
    PairSourceModel,
    SettingsQuad,
    ch_statistic,
    coincidence_probability,
    critical_efficiency,
    outcome_distribution,
    singles_probability,
)
