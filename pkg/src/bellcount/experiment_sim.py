"""Monte Carlo generator of synthetic experiment records.

Per setting, with ``T`` trials:

1. pairs produced ~ Binomial(T, mu)
2. joint polarization outcomes ~ Multinomial(pairs, outcome_distribution)
3. Alice detects each photon with probability eta1, Bob with eta2, independently

A coincidence is a pair where both photons exit "+" and both are detected.
Sampling is done on aggregate counts, which is exact for this model, so a
setting costs a handful of draws however large ``T`` is.

Singles are accumulated over every trial in which the party's analyzer sat
at the recorded angle: Alice's ``a`` singles come from settings (a,b) and
(a,b'), Bob's ``b`` singles from (a,b) and (a',b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .anomaly_report import anomaly_ratio
from .count_pipeline import (
    DEFAULT_REFERENCE_TRIALS,
    SETTING_ORDER,
    ExperimentRecord,
    SettingData,
    SinglesCount,
    fit_scale,
    normalize_record,
    quantum_setting_probabilities,
    _is_int,
)
from .errors import InvalidArgumentError, UndefinedDiagnosticError
from .quantum_model import PairSourceModel, SettingsQuad, outcome_distribution

GENERATOR = "numpy.random.PCG64"
ANOMALY_SETTING = ("a_prime", "b_prime")


@dataclass(frozen=True)
class SimConfig:
    model: PairSourceModel
    angles: SettingsQuad
    trials_per_setting: tuple[int, int, int, int]
    pair_probability: float
    eta1: float
    eta2: float
    anomaly_multiplier: float = 1.0
    seed: int = 0
    reference_trials: int = DEFAULT_REFERENCE_TRIALS

    def __post_init__(self):
        if not isinstance(self.model, PairSourceModel):
            raise InvalidArgumentError("model must be a PairSourceModel")
        if not isinstance(self.angles, SettingsQuad):
            raise InvalidArgumentError("angles must be a SettingsQuad")
        trials = tuple(self.trials_per_setting)
        if len(trials) != 4 or not all(_is_int(t) and t >= 1 for t in trials):
            raise InvalidArgumentError(f"trials_per_setting must be four integers >= 1, got {trials!r}")
        object.__setattr__(self, "trials_per_setting", tuple(int(t) for t in trials))
        for name in ("pair_probability", "eta1", "eta2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value!r}")
        m = self.anomaly_multiplier
        if isinstance(m, bool) or not isinstance(m, (int, float)) or not math.isfinite(m) or m < 0:
            raise InvalidArgumentError(f"anomaly_multiplier must be finite and >= 0, got {m!r}")
        if not _is_int(self.seed) or not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not _is_int(self.reference_trials) or self.reference_trials < 1:
            raise InvalidArgumentError(f"reference_trials must be an integer >= 1, got {self.reference_trials!r}")
        # raises if the multiplier pushes p(a',b') above one
        self.outcome_probabilities()

    @property
    def true_scale(self) -> float:
        return self.pair_probability * self.reference_trials * self.eta1 * self.eta2

    def outcome_probabilities(self) -> list[np.ndarray]:
        """Joint outcome probabilities (pp, pm, mp, mm) per setting, anomaly applied."""
        out = []
        for key, (x, y) in zip(SETTING_ORDER, self.angles.pairs()):
            probs = outcome_distribution(self.model, x, y).as_array()
            if key == ANOMALY_SETTING:
                probs = inject_anomaly(probs, self.anomaly_multiplier)
            out.append(probs)
        return out


def inject_anomaly(probs: Sequence[float], multiplier: float) -> np.ndarray:
    """Scale ``p_pp`` by ``multiplier`` and rescale the other outcomes to keep the sum at one."""
    probs = np.asarray(probs, dtype=float)
    if multiplier == 1.0:
        return probs.copy()
    boosted = multiplier * probs[0]
    if boosted > 1.0:
        raise InvalidArgumentError(
            f"anomaly_multiplier {multiplier!r} pushes p(a',b') to {boosted!r} > 1"
        )
    rest = 1.0 - probs[0]
    if rest <= 0.0:
        raise InvalidArgumentError("cannot rescale complementary outcomes: they carry zero probability")
    out = np.empty(4)
    out[0] = boosted
    out[1:] = probs[1:] * ((1.0 - boosted) / rest)
    return out


@dataclass(frozen=True)
class SettingCounts:
    pairs: int
    coincidences: int
    alice_plus_detected: int
    bob_plus_detected: int


def simulate_setting(
    rng: np.random.Generator, trials: int, mu: float, probs: np.ndarray, eta1: float, eta2: float
) -> SettingCounts:
    pairs = int(rng.binomial(trials, mu))
    n_pp, n_pm, n_mp, _ = (int(v) for v in rng.multinomial(pairs, probs))
    both, alice_only, bob_only, _ = rng.multinomial(
        n_pp, [eta1 * eta2, eta1 * (1.0 - eta2), (1.0 - eta1) * eta2, (1.0 - eta1) * (1.0 - eta2)]
    )
    alice = int(both + alice_only + rng.binomial(n_pm, eta1))
    bob = int(both + bob_only + rng.binomial(n_mp, eta2))
    return SettingCounts(pairs=pairs, coincidences=int(both), alice_plus_detected=alice, bob_plus_detected=bob)


def repetition_rng(seed: int, repetition: Optional[int] = None) -> np.random.Generator:
    """Generator for ``seed``; each repetition index gets an independent child stream."""
    spawn_key = () if repetition is None else (int(repetition),)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def simulate_counts(config: SimConfig, rng: np.random.Generator) -> list[SettingCounts]:
    return [
        simulate_setting(rng, t, config.pair_probability, probs, config.eta1, config.eta2)
        for t, probs in zip(config.trials_per_setting, config.outcome_probabilities())
    ]


def simulate_experiment(config: SimConfig, repetition: Optional[int] = None) -> ExperimentRecord:
    """One synthetic record; deterministic in (config.seed, repetition)."""
    counts = simulate_counts(config, repetition_rng(config.seed, repetition))
    by_key = dict(zip(SETTING_ORDER, counts))
    singles_a = by_key["a", "b"].alice_plus_detected + by_key["a", "b_prime"].alice_plus_detected
    singles_b = by_key["a", "b"].bob_plus_detected + by_key["a_prime", "b"].bob_plus_detected
    return ExperimentRecord(
        angles=config.angles,
        settings=tuple(
            SettingData(alice, bob, trials, c.coincidences)
            for (alice, bob), trials, c in zip(SETTING_ORDER, config.trials_per_setting, counts)
        ),
        reference_trials=config.reference_trials,
        singles_alice=SinglesCount("a", singles_a),
        singles_bob=SinglesCount("b", singles_b),
        model=config.model,
    )


@dataclass
class RecoveryStats:
    repetitions: int
    true_scale: float
    scales: np.ndarray = field(repr=False)
    mean_scale: float
    std_scale: float
    standard_error: float
    setting_bias: np.ndarray
    mean_ratio: np.ndarray
    ratio_standard_error: np.ndarray
    seed: int
    generator: str = GENERATOR

    @property
    def z_scale(self) -> float:
        """Distance of the mean recovered scale from the truth, in standard errors."""
        if self.standard_error == 0.0:
            return 0.0 if self.mean_scale == self.true_scale else math.inf
        return (self.mean_scale - self.true_scale) / self.standard_error

    def to_dict(self) -> dict:
        labels = [f"{a},{b}" for a, b in SETTING_ORDER]
        return {
            "repetitions": self.repetitions,
            "seed": self.seed,
            "generator": self.generator,
            "true_scale": self.true_scale,
            "mean_scale": self.mean_scale,
            "std_scale": self.std_scale,
            "standard_error": self.standard_error,
            "z_scale": self.z_scale,
            "setting_bias": dict(zip(labels, map(float, self.setting_bias))),
            "mean_ratio": dict(zip(labels, [None if math.isnan(v) else float(v) for v in self.mean_ratio])),
            "ratio_standard_error": dict(
                zip(labels, [None if math.isnan(v) else float(v) for v in self.ratio_standard_error])
            ),
        }


def _ratio_or_nan(corrected, predicted):
    try:
        return anomaly_ratio(corrected, predicted)
    except UndefinedDiagnosticError:
        return math.nan


def validate_pipeline(config: SimConfig, repetitions: int, independent: bool = True) -> RecoveryStats:
    """Simulate, normalize and fit ``repetitions`` times; summarize scale recovery.

    With ``independent=False`` every repetition reuses ``config.seed`` directly.
    Per-setting bias is measured against the unperturbed quantum expectation
    ``true_scale * Q_j``; ratios are corrected / fitted prediction.
    """
    if not _is_int(repetitions) or repetitions < 2:
        raise InvalidArgumentError(f"repetitions must be an integer >= 2, got {repetitions!r}")
    q = quantum_setting_probabilities(config.model, config.angles)
    scales = np.empty(repetitions)
    corrected = np.empty((repetitions, 4))
    ratios = np.empty((repetitions, 4))
    for i in range(repetitions):
        record = simulate_experiment(config, i if independent else None)
        e = list(normalize_record(record).values())
        fit = fit_scale(e, q)
        scales[i] = fit.scale
        corrected[i] = e
        ratios[i] = [_ratio_or_nan(ej, fit.scale * qj) for ej, qj in zip(e, q)]
    std = float(scales.std(ddof=1))
    return RecoveryStats(
        repetitions=repetitions,
        true_scale=config.true_scale,
        scales=scales,
        mean_scale=float(scales.mean()),
        std_scale=std,
        standard_error=std / math.sqrt(repetitions),
        setting_bias=corrected.mean(axis=0) - config.true_scale * q,
        mean_ratio=ratios.mean(axis=0),
        ratio_standard_error=ratios.std(axis=0, ddof=1) / math.sqrt(repetitions),
        seed=config.seed,
    )


def with_seed(config: SimConfig, seed: int) -> SimConfig:
    return replace(config, seed=seed)
