"""Raw / corrected / predicted comparison with Poisson diagnostics.

Statistical uncertainty of a count is taken as ``sqrt(predicted)``, i.e. a
Poisson count whose mean is the quantum prediction.  Diagnostics that would
divide by a non-positive prediction are reported as ``None`` in the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .count_pipeline import (
    ExperimentRecord,
    fit_scale,
    normalize_record,
    predicted_counts,
    quantum_setting_probabilities,
    setting_key,
)
from .errors import InvalidArgumentError, UndefinedDiagnosticError
from .quantum_model import PairSourceModel, SettingsQuad


@dataclass(frozen=True)
class ComparisonRow:
    alice: str
    bob: str
    raw: int
    trials: int
    corrected: float
    probability: float
    predicted: float
    z_score: Optional[float]
    ratio: Optional[float]

    @property
    def label(self) -> str:
        return setting_key(self.alice, self.bob)


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]
    scale: float
    sse: float
    model: PairSourceModel
    angles: SettingsQuad
    reference_trials: int


def _z(corrected, predicted, index=None):
    if not predicted > 0:
        raise UndefinedDiagnosticError(
            f"z-score undefined for entry {index}: predicted count {predicted!r} is not positive", index
        )
    return (corrected - predicted) / math.sqrt(predicted)


def poisson_z_scores(corrected: Sequence[float], predicted: Sequence[float]) -> list[float]:
    """``(corrected - predicted) / sqrt(predicted)`` for each entry."""
    if len(corrected) != len(predicted):
        raise ValueError("corrected and predicted must have equal length")
    return [_z(float(c), float(p), i) for i, (c, p) in enumerate(zip(corrected, predicted))]


def anomaly_ratio(corrected: float, predicted: float) -> float:
    if not predicted > 0:
        raise UndefinedDiagnosticError(f"ratio undefined: predicted count {predicted!r} is not positive")
    return corrected / predicted


def _or_none(fn, *args):
    try:
        return fn(*args)
    except UndefinedDiagnosticError:
        return None


def build_comparison(record: ExperimentRecord, model: PairSourceModel) -> ComparisonTable:
    corrected = list(normalize_record(record).values())
    q = quantum_setting_probabilities(model, record.angles)
    fit = fit_scale(corrected, q)
    predicted = predicted_counts(fit.scale, q)
    rows = []
    for setting, e, p, n in zip(record.settings, corrected, q, predicted):
        n = float(n)
        rows.append(
            ComparisonRow(
                alice=setting.alice_label,
                bob=setting.bob_label,
                raw=setting.coincidences,
                trials=setting.trials,
                corrected=e,
                probability=float(p),
                predicted=n,
                z_score=_or_none(_z, e, n),
                ratio=_or_none(anomaly_ratio, e, n),
            )
        )
    return ComparisonTable(
        rows=tuple(rows),
        scale=fit.scale,
        sse=fit.sse,
        model=model,
        angles=record.angles,
        reference_trials=record.reference_trials,
    )


def empirical_ch(record: ExperimentRecord) -> float:
    """Count-level CH statistic, per trial, from coincidences and singles.

    Each coincidence count is divided by its own setting's trials.  A singles
    count is taken to cover every trial in which that party's analyzer sat
    at the labelled angle, so it is divided by the summed trials of those
    settings.  Requires singles for Alice at ``a`` and Bob at ``b``.
    """
    if not record.has_singles:
        raise InvalidArgumentError("empirical CH needs singles counts")
    if record.singles_alice.label != "a" or record.singles_bob.label != "b":
        raise InvalidArgumentError(
            f"empirical CH needs singles at (a, b), got "
            f"({record.singles_alice.label}, {record.singles_bob.label})"
        )
    rate = {s.key: s.coincidences / s.trials for s in record.settings}
    trials_a = sum(s.trials for s in record.settings if s.alice_label == "a")
    trials_b = sum(s.trials for s in record.settings if s.bob_label == "b")
    return math.fsum([
        rate["a", "b"],
        rate["a", "b_prime"],
        rate["a_prime", "b"],
        -rate["a_prime", "b_prime"],
        -record.singles_alice.count / trials_a,
        -record.singles_bob.count / trials_b,
    ])
