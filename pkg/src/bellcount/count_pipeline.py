"""Trial normalization and the least-squares fit of the coincidence scale.

Counts measured at each setting are first rescaled to a common number of
trials.  The scale ``N * eta1 * eta2`` (expected coincidences at unit
quantum probability) is then the single parameter ``s`` minimizing
``sum_j (E_j - s * Q_j)^2``, which has the closed form
``s = sum(Q_j E_j) / sum(Q_j^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateFitError, InvalidArgumentError, ValidationError
from .quantum_model import PairSourceModel, SettingsQuad, coincidence_probability

DEFAULT_REFERENCE_TRIALS = 28_000_000

ALICE_LABELS = ("a", "a_prime")
BOB_LABELS = ("b", "b_prime")
SETTING_ORDER = (("a", "b"), ("a", "b_prime"), ("a_prime", "b"), ("a_prime", "b_prime"))


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def setting_key(alice: str, bob: str) -> str:
    """Display key such as ``a,b'``."""
    return f"{alice},{bob}".replace("_prime", "'")


@dataclass(frozen=True)
class SettingData:
    alice_label: str
    bob_label: str
    trials: int
    coincidences: int

    def __post_init__(self):
        where = f"setting ({self.alice_label}, {self.bob_label})"
        if self.alice_label not in ALICE_LABELS:
            raise ValidationError(f"{where}: alice label must be one of {ALICE_LABELS}")
        if self.bob_label not in BOB_LABELS:
            raise ValidationError(f"{where}: bob label must be one of {BOB_LABELS}")
        if not _is_int(self.trials) or self.trials < 1:
            raise ValidationError(f"{where}: trials must be an integer >= 1, got {self.trials!r}")
        if not _is_int(self.coincidences) or self.coincidences < 0:
            raise ValidationError(f"{where}: coincidences must be an integer >= 0, got {self.coincidences!r}")
        if self.coincidences > self.trials:
            raise ValidationError(
                f"{where}: coincidences ({self.coincidences}) exceed trials ({self.trials})"
            )

    @property
    def key(self) -> tuple[str, str]:
        return (self.alice_label, self.bob_label)


@dataclass(frozen=True)
class SinglesCount:
    label: str
    count: int


@dataclass(frozen=True)
class ExperimentRecord:
    """Raw per-setting counts of one experiment.

    ``settings`` is stored in canonical order (a,b), (a,b'), (a',b), (a',b')
    regardless of input order.
    """

    angles: SettingsQuad
    settings: tuple[SettingData, ...]
    reference_trials: int = DEFAULT_REFERENCE_TRIALS
    singles_alice: Optional[SinglesCount] = None
    singles_bob: Optional[SinglesCount] = None
    model: Optional[PairSourceModel] = None

    def __post_init__(self):
        if not _is_int(self.reference_trials) or self.reference_trials < 1:
            raise ValidationError(f"reference_trials must be an integer >= 1, got {self.reference_trials!r}")
        if not isinstance(self.angles, SettingsQuad):
            raise ValidationError("angles must be a SettingsQuad")
        by_key = {}
        for item in self.settings:
            if not isinstance(item, SettingData):
                raise ValidationError(f"settings entries must be SettingData, got {type(item).__name__}")
            if item.key in by_key:
                raise ValidationError(f"duplicate setting ({item.alice_label}, {item.bob_label})")
            by_key[item.key] = item
        missing = [k for k in SETTING_ORDER if k not in by_key]
        if missing or len(by_key) != 4:
            raise ValidationError(f"settings must cover all four pairs; missing {missing}")
        object.__setattr__(self, "settings", tuple(by_key[k] for k in SETTING_ORDER))
        for party, singles, labels in (
            ("alice", self.singles_alice, ALICE_LABELS),
            ("bob", self.singles_bob, BOB_LABELS),
        ):
            if singles is None:
                continue
            if singles.label not in labels:
                raise ValidationError(f"singles.{party}.label must be one of {labels}, got {singles.label!r}")
            if not _is_int(singles.count) or singles.count < 0:
                raise ValidationError(f"singles.{party}.count must be an integer >= 0, got {singles.count!r}")
        if (self.singles_alice is None) != (self.singles_bob is None):
            raise ValidationError("singles must give both alice and bob counts or neither")

    @property
    def has_singles(self) -> bool:
        return self.singles_alice is not None

    def raw_counts(self) -> list[int]:
        return [s.coincidences for s in self.settings]

    def trials(self) -> list[int]:
        return [s.trials for s in self.settings]

    def setting(self, alice: str, bob: str) -> SettingData:
        for s in self.settings:
            if s.key == (alice, bob):
                return s
        raise KeyError((alice, bob))


@dataclass(frozen=True)
class ScaleFit:
    scale: float
    q: np.ndarray
    e: np.ndarray
    residuals: np.ndarray = field(repr=False)
    sse: float


def normalize_count(raw: int, trials: int, reference_trials: int) -> float:
    """Rescale ``raw`` counts from ``trials`` trials to ``reference_trials``; unrounded."""
    if not _is_int(raw) or raw < 0:
        raise InvalidArgumentError(f"raw count must be an integer >= 0, got {raw!r}")
    if not _is_int(trials) or trials < 1:
        raise InvalidArgumentError(f"trials must be an integer >= 1, got {trials!r}")
    if not _is_int(reference_trials) or reference_trials < 1:
        raise InvalidArgumentError(f"reference_trials must be an integer >= 1, got {reference_trials!r}")
    # int / int true division is correctly rounded
    return int(raw) * int(reference_trials) / int(trials)


def normalize_record(record: ExperimentRecord) -> dict[tuple[str, str], float]:
    """Corrected counts keyed by (alice, bob) label, in canonical setting order."""
    return {
        s.key: normalize_count(s.coincidences, s.trials, record.reference_trials)
        for s in record.settings
    }


def quantum_setting_probabilities(model: PairSourceModel, settings: SettingsQuad) -> np.ndarray:
    return np.array([coincidence_probability(model, x, y) for x, y in settings.pairs()])


def fit_scale(e: Sequence[float], q: Sequence[float]) -> ScaleFit:
    """Closed-form least-squares scale ``sum(q*e) / sum(q^2)``."""
    e = np.asarray(e, dtype=float)
    q = np.asarray(q, dtype=float)
    if e.shape != q.shape or e.ndim != 1 or e.size == 0:
        raise InvalidArgumentError(f"e and q must be equal-length 1-d sequences, got {e.shape} and {q.shape}")
    if not (np.all(np.isfinite(e)) and np.all(np.isfinite(q))):
        raise InvalidArgumentError("e and q must be finite")
    if np.any(e < 0):
        raise InvalidArgumentError("corrected counts must be nonnegative")
    if np.any((q < 0) | (q > 1)):
        raise InvalidArgumentError("probabilities must lie in [0, 1]")
    denom = math.fsum(q * q)
    if denom <= 0.0:
        raise DegenerateFitError("all quantum probabilities are zero; scale is undetermined")
    scale = math.fsum(q * e) / denom
    residuals = e - scale * q
    return ScaleFit(scale=scale, q=q, e=e, residuals=residuals, sse=math.fsum(residuals**2))


def predicted_counts(scale: float, q: Sequence[float]) -> np.ndarray:
    if not math.isfinite(scale) or scale < 0:
        raise InvalidArgumentError(f"scale must be finite and >= 0, got {scale!r}")
    return scale * np.asarray(q, dtype=float)
