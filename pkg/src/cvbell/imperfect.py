"""Faulty squeezing sources and imperfect photon addition / subtraction.

Measurements are always set for the state the experimenter believes to
have; the Bell value of the state actually produced is evaluated at those
fixed settings.  Imperfect operations replace the k-photon state by the
mixture ``sum_i p_i rho_(k - i)`` with suppression weights ``p_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np

from .noise import NoisyStateModel, ab_of
from .pseudospin import BellSettings, bell_chsh, correlators, kernel, optimal_settings
from .specfun import DEFAULT, SeriesControl
from .states import PhotonVariedState


@dataclass(frozen=True)
class FaultyGenerator:
    """Source labelled with squeezing ``r_label`` that actually produces ``r_actual``."""

    r_label: float
    r_actual: float

    def __post_init__(self):
        if not self.r_label > 0:
            raise ValueError(f"labelled squeezing must be positive, got {self.r_label}")
        if not 0 < self.r_actual <= self.r_label:
            raise ValueError(
                f"produced squeezing must lie in (0, {self.r_label}], got {self.r_actual}"
            )


def chi_faulty(gen: FaultyGenerator) -> float:
    """``2 (1 + tanh 2r' tanh 2r) / sqrt(1 + tanh^2 2r)``."""
    t = math.tanh(2 * gen.r_label)
    return 2 * (1 + math.tanh(2 * gen.r_actual) * t) / math.sqrt(1 + t * t)


def critical_rprime(r_label: float) -> float:
    """Produced squeezing below which a source labelled ``r_label`` cannot violate."""
    if not r_label > 0:
        raise ValueError(f"labelled squeezing must be positive, got {r_label}")
    t = math.tanh(2 * r_label)
    # (sqrt(1 + t^2) - 1) / t written without cancellation
    return 0.5 * math.atanh(t / (math.sqrt(1 + t * t) + 1))


def _fixed_chi(components: Sequence, weights: Sequence[float], settings: BellSettings,
               ctrl: SeriesControl) -> float:
    return float(sum(w * bell_chsh(c, settings, ctrl) for w, c in zip(weights, components)))


def chi_faulty_added(gen: FaultyGenerator, k: int, ctrl: SeriesControl = DEFAULT) -> float:
    """Bell value of the produced state with ``k`` photons added (``k < 0``: subtracted)
    on mode 1, measured with the settings optimal for the labelled state."""
    settings = optimal_settings(kernel(PhotonVariedState.from_r(gen.r_label, k, 0), ctrl))
    return bell_chsh(PhotonVariedState.from_r(gen.r_actual, k, 0), settings, ctrl)


@dataclass(frozen=True)
class SuppressionModel:
    """Weights of under-performing photon operations.

    ``exponential``: ``p_i ~ exp(-i / dispersion)``; ``gaussian``:
    ``p_i ~ exp(-i^2 / dispersion^2)``, for ``i = 0..cutoff``.
    """

    kind: Literal["exponential", "gaussian"]
    dispersion: float
    cutoff: int

    def __post_init__(self):
        if self.kind not in ("exponential", "gaussian"):
            raise ValueError(f"unknown suppression kind {self.kind!r}")
        if not self.dispersion > 0:
            raise ValueError(f"dispersion must be positive, got {self.dispersion}")
        if self.cutoff < 0:
            raise ValueError(f"cutoff must be nonnegative, got {self.cutoff}")


def suppression_weights(model: SuppressionModel) -> np.ndarray:
    i = np.arange(model.cutoff + 1, dtype=float)
    if model.kind == "exponential":
        logw = -i / model.dispersion
    else:
        logw = -(i**2) / model.dispersion**2
    w = np.exp(logw - logw.max())
    return w / w.sum()


def _check_cutoff(k: int, sup: SuppressionModel):
    if sup.cutoff > abs(k):
        raise ValueError(f"suppression cutoff {sup.cutoff} exceeds the photon number {abs(k)}")


def _shrink(k: int, i: int) -> int:
    return k - i if k >= 0 else k + i


def chi_imperfect_noisy(model: NoisyStateModel, k: int, sup: SuppressionModel,
                        ctrl: SeriesControl = DEFAULT, printed: bool = False) -> float:
    """Bell value of ``sum_i p_i rho_(k-i)`` for a noisy state with known ``p``.

    Settings are those optimal for the noisy state with exactly ``k`` photons.
    With ``printed=True`` the closed combination of per-component ``A, B``
    coefficients is returned instead; it drops the unpaired vacuum weight of
    the zero-photon component when ``k`` is odd and ``cutoff == k``.
    """
    _check_cutoff(k, sup)
    weights = suppression_weights(sup)
    target = ab_of(model.with_k(k), ctrl)
    norm = math.hypot(target.a_coeff, target.b_coeff)
    if printed:
        total = 0.0
        for i, w in enumerate(weights):
            ab = ab_of(model.with_k(_shrink(k, i)), ctrl)
            if i % 2 == 0:
                total += w * (target.a_coeff * ab.a_coeff + target.b_coeff * ab.b_coeff)
            else:
                total -= w * target.a_coeff * ab.a_coeff
        return float(2 * total / norm)
    theta = math.atan2(target.b_coeff, target.a_coeff)
    settings = BellSettings(0.0, theta, math.pi / 2, -theta, *target.q_pair)
    comps = [model.with_k(_shrink(k, i)) for i in range(len(weights))]
    return _fixed_chi(comps, weights, settings, ctrl)


def chi_imperfect_faulty(gen: FaultyGenerator, k: int, sup: SuppressionModel,
                         ctrl: SeriesControl = DEFAULT, printed: bool = False) -> float:
    """Imperfect ``k``-photon operation on a faulty source, settings for the labelled state.

    ``printed=True`` gives the closed combination ``1 + K'_(k-i) K_k`` for even
    ``i`` and ``-1`` for odd ``i``; see :func:`chi_imperfect_noisy`.
    """
    _check_cutoff(k, sup)
    weights = suppression_weights(sup)
    kern = kernel(PhotonVariedState.from_r(gen.r_label, k, 0), ctrl)
    if printed:
        total = 0.0
        for i, w in enumerate(weights):
            if i % 2 == 0:
                kp = kernel(PhotonVariedState.from_r(gen.r_actual, _shrink(k, i), 0), ctrl).K
                total += w * (1 + kp * kern.K)
            else:
                total -= w
        return float(2 * total / math.hypot(1.0, kern.K))
    settings = optimal_settings(kern)
    comps = [PhotonVariedState.from_r(gen.r_actual, _shrink(k, i), 0) for i in range(len(weights))]
    return _fixed_chi(comps, weights, settings, ctrl)


def activation_threshold(chi_curve: Callable[[int], float] | Sequence[float],
                         k_max: int, bound: float = 2.0) -> int | None:
    """Smallest ``k <= k_max`` at which the curve exceeds ``bound``, else ``None``."""
    for k in range(k_max + 1):
        if callable(chi_curve):
            v = chi_curve(k)
        elif k < len(chi_curve):
            v = chi_curve[k]
        else:
            break
        if v > bound:
            return k
    return None
