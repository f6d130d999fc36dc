"""Closed-form predictions for polarization-entangled photon pairs.

The pair state is ``(|HH> + r|VV>) / sqrt(1 + r^2)``.  With analyzers at
angles ``alpha`` (Alice) and ``beta`` (Bob), the probability that both
photons land in the "+" channel is::

    p(alpha, beta) = (sin(alpha) sin(beta) + r cos(alpha) cos(beta))^2 / (1 + r^2)

The "+" channel is *defined* by this expression; the "-" channel of each
analyzer is the orthogonal one, reached by rotating that analyzer by 90 deg.

All public functions take angles in degrees.  ``coincidence_probability``,
``outcome_distribution`` and ``singles_probability`` broadcast over numpy
arrays; the CH helpers are scalar.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidArgumentError, NonPositiveDenominatorError

ArrayLike = Union[float, np.ndarray]

DEG = math.pi / 180.0

# probabilities carry ~1 ulp absolute error, e.g. cos(90 deg) = 6e-17
COMBINATION_ATOL = 4 * sys.float_info.epsilon


@dataclass(frozen=True)
class PairSourceModel:
    """Amplitude ratio ``r`` of |VV> to |HH> in the pair state."""

    r: float

    def __post_init__(self):
        r = self.r
        if isinstance(r, bool) or not isinstance(r, (int, float, np.floating, np.integer)):
            raise InvalidArgumentError(f"r must be a real number, got {r!r}")
        if not math.isfinite(r) or r < 0:
            raise InvalidArgumentError(f"r must be finite and >= 0, got {r!r}")
        object.__setattr__(self, "r", float(r))


@dataclass(frozen=True)
class SettingsQuad:
    """Analyzer angles in degrees: Alice uses ``a``/``a_prime``, Bob ``b``/``b_prime``."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise InvalidArgumentError(f"angle {name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidArgumentError(f"angle {name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))

    def angle(self, label: str) -> float:
        if label not in ("a", "a_prime", "b", "b_prime"):
            raise InvalidArgumentError(f"unknown angle label {label!r}")
        return getattr(self, label)

    def pairs(self) -> list[tuple[float, float]]:
        """Angle pairs in the fixed order (a,b), (a,b'), (a',b), (a',b')."""
        return [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]


#: Angles used in the Christensen et al. photon Bell test.
CHRISTENSEN_SETTINGS = SettingsQuad(a=3.8, a_prime=-25.2, b=-3.8, b_prime=25.2)
CHRISTENSEN_MODEL = PairSourceModel(r=0.26)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint probabilities of the transmit(+)/reflect(-) outcomes."""

    p_pp: ArrayLike
    p_pm: ArrayLike
    p_mp: ArrayLike
    p_mm: ArrayLike

    def as_array(self) -> np.ndarray:
        return np.array([self.p_pp, self.p_pm, self.p_mp, self.p_mm], dtype=float)

    def total(self) -> ArrayLike:
        return self.p_pp + self.p_pm + self.p_mp + self.p_mm


def _check_model(model):
    if not isinstance(model, PairSourceModel):
        raise InvalidArgumentError(f"expected PairSourceModel, got {type(model).__name__}")


def _radians(name, degrees):
    arr = np.asarray(degrees, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} must be finite, got {degrees!r}")
    return arr * DEG


def _scalarize(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _amplitude_sq(r, sa, ca, sb, cb):
    # grouping keeps p(alpha, beta) == p(beta, alpha) bit for bit
    return (sa * sb + r * (ca * cb)) ** 2 / (1.0 + r * r)


def coincidence_probability(model: PairSourceModel, alpha: ArrayLike, beta: ArrayLike) -> ArrayLike:
    """Probability of a "+"/"+" coincidence with analyzers at ``alpha``, ``beta`` (degrees)."""
    _check_model(model)
    a = _radians("alpha", alpha)
    b = _radians("beta", beta)
    p = _amplitude_sq(model.r, np.sin(a), np.cos(a), np.sin(b), np.cos(b))
    return _scalarize(p)


def outcome_distribution(model: PairSourceModel, alpha: ArrayLike, beta: ArrayLike) -> OutcomeDistribution:
    """All four joint outcome probabilities.

    The "-" outcome of an analyzer is the "+" outcome at angle + 90 deg, which
    maps (sin, cos) to (cos, -sin); the swap is applied directly so the
    four terms sum to one without the rounding of a shifted angle.
    """
    _check_model(model)
    a = _radians("alpha", alpha)
    b = _radians("beta", beta)
    r = model.r
    sa, ca, sb, cb = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
    return OutcomeDistribution(
        p_pp=_scalarize(_amplitude_sq(r, sa, ca, sb, cb)),
        p_pm=_scalarize(_amplitude_sq(r, sa, ca, cb, -sb)),
        p_mp=_scalarize(_amplitude_sq(r, ca, -sa, sb, cb)),
        p_mm=_scalarize(_amplitude_sq(r, ca, -sa, cb, -sb)),
    )


def singles_probability(model: PairSourceModel, angle: ArrayLike) -> ArrayLike:
    """Probability that one party's photon exits "+" at ``angle``, either party."""
    _check_model(model)
    x = _radians("angle", angle)
    r = model.r
    p = (np.sin(x) ** 2 + r * r * np.cos(x) ** 2) / (1.0 + r * r)
    return _scalarize(p)


def _check_efficiency(name, eta):
    if isinstance(eta, bool) or not isinstance(eta, (int, float, np.floating, np.integer)):
        raise InvalidArgumentError(f"{name} must be a real number, got {eta!r}")
    if not (0.0 <= eta <= 1.0):
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {eta!r}")
    return float(eta)


def _coincidence_combination(model, settings):
    q = [coincidence_probability(model, x, y) for x, y in settings.pairs()]
    return math.fsum([q[0], q[1], q[2], -q[3]])


def ch_statistic(model: PairSourceModel, settings: SettingsQuad, eta1: float, eta2: float) -> float:
    """Clauser-Horne statistic in probability form.

    ``J = eta1*eta2*[p(a,b) + p(a,b') + p(a',b) - p(a',b')] - eta1*pA(a) - eta2*pB(b)``.
    Local hidden-variable models satisfy ``J <= 0``.
    """
    _check_model(model)
    eta1 = _check_efficiency("eta1", eta1)
    eta2 = _check_efficiency("eta2", eta2)
    combo = _coincidence_combination(model, settings)
    sa = singles_probability(model, settings.a)
    sb = singles_probability(model, settings.b)
    return math.fsum([eta1 * eta2 * combo, -eta1 * sa, -eta2 * sb])


def critical_efficiency(model: PairSourceModel, settings: SettingsQuad) -> float:
    """Symmetric detection efficiency at which ``ch_statistic`` crosses zero.

    Raises NonPositiveDenominatorError when the coincidence combination is
    not positive (within a few ulps), in which case no efficiency gives a
    violation.
    """
    _check_model(model)
    combo = _coincidence_combination(model, settings)
    if not combo > COMBINATION_ATOL:
        raise NonPositiveDenominatorError(
            f"coincidence combination p(a,b)+p(a,b')+p(a',b)-p(a',b') = {combo!r} is not positive; "
            "no detection efficiency yields a CH violation"
        )
    singles = math.fsum([singles_probability(model, settings.a), singles_probability(model, settings.b)])
    return singles / combo
