"""Pseudospin correlations and the maximal Bell-CHSH value of photon-varied states.

The pseudospin operator with index ``q`` pairs Fock levels
``(2n + q, 2n + q + 1)`` for every ``n >= 0`` with ``2n + q >= 0``; within a
pair it acts as a Pauli operator (lower level is the ``-1`` eigenstate of
``S^z``) and it annihilates unpaired levels.  Photon-varied states keep the
photon-number difference of the two modes fixed, so every correlator of
``S^z`` and ``S^x = S^+ + S^-`` reduces to a banded sum over one coefficient
vector: cross terms ``<S^z (x) S^x>`` vanish identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import singledispatch

import numpy as np

from .specfun import DEFAULT, SeriesControl
from .states import CoefficientVector, PhotonVariedState, coefficients

Q_WINDOW = range(-2, 3)


def lower_level(q: int, j):
    """True where level ``j`` is the lower member of a ``q``-pair."""
    j = np.asarray(j)
    return (j >= max(q, 0)) & ((j - q) % 2 == 0)


def sz_eigenvalue(q: int, j):
    """Diagonal of ``S^z_q`` at level ``j``: -1, +1, or 0 for unpaired levels."""
    j = np.asarray(j)
    return np.where(lower_level(q, j), -1.0, np.where(lower_level(q, j - 1), 1.0, 0.0))


def zz_correlator(cv: CoefficientVector, q1: int, q2: int) -> float:
    """``<S^z_q1 (x) S^z_q2>`` of a pure photon-varied state."""
    z = sz_eigenvalue(q1, cv.mode1_levels()) * sz_eigenvalue(q2, cv.mode2_levels())
    return float(np.sum(cv.entries**2 * z))


def xx_correlator(cv: CoefficientVector, q1: int, q2: int) -> float:
    """``<S^x_q1 (x) S^x_q2>``: neighbouring coefficients paired in both modes."""
    c = cv.entries
    both = lower_level(q1, cv.mode1_levels()[:-1]) & lower_level(q2, cv.mode2_levels()[:-1])
    return float(2.0 * np.sum(c[:-1] * c[1:] * both))


@dataclass(frozen=True)
class KernelForm:
    """Correlation function ``E = sign cos(a) cos(b) + K sin(a) sin(b)``.

    ``sign`` is ``<S^z (x) S^z>`` at ``q_pair``.  It equals +1 whenever the
    chosen pseudospin pairs cover the whole support of the state, and drops
    below one only when a support level is left unpaired.
    """

    sign: float
    K: float
    q_pair: tuple[int, int]

    def __post_init__(self):
        if not -1e-12 <= self.K <= 1 + 1e-12:
            raise ValueError(f"K must lie in [0, 1], got {self.K}")


@dataclass(frozen=True)
class BellSettings:
    theta_a: float
    theta_b: float
    theta_a_prime: float
    theta_b_prime: float
    q1: int = 0
    q2: int = 0


def pair_options(cv: CoefficientVector) -> list[KernelForm]:
    """The two adjacent-pair sums of the coefficient vector.

    Option ``p`` pairs entries ``(i, i + 1)`` with ``i = p mod 2``; the
    pseudospin indices that realise it are fixed by the parity of the lowest
    occupied level of each mode.
    """
    out = []
    for parity in (0, 1):
        q1 = (cv.start + parity) % 2
        q2 = (cv.start + cv.offset + parity) % 2
        c = cv.entries
        K = 2.0 * float(np.sum(c[parity:-1:2] * c[parity + 1 :: 2]))
        out.append(KernelForm(zz_correlator(cv, q1, q2), min(K, 1.0), (q1, q2)))
    return out


def kernel_from_coefficients(cv: CoefficientVector) -> KernelForm:
    options = pair_options(cv)
    return max(options, key=lambda f: (f.sign**2 + f.K**2, -options.index(f)))


def kernel(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> KernelForm:
    """Sign, sine-sine weight and optimal ``(q1, q2)`` of a pure photon-varied state.

    Of the two adjacent-pair sums the one giving the larger Bell value is
    kept.  When both options cover the full support this is simply the larger
    sum; otherwise the unpaired weight lowers ``sign`` and is accounted for.
    """
    return kernel_from_coefficients(coefficients(state, ctrl))


def unit_sign_kernel(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> KernelForm:
    """Larger adjacent-pair sum with the cosine-cosine weight taken as one.

    Overstates the Bell value whenever the winning pairing leaves a support
    level unpaired; kept to compare against :func:`kernel`.
    """
    best = max(pair_options(coefficients(state, ctrl)), key=lambda f: f.K)
    return KernelForm(1.0, best.K, best.q_pair)


def chi_max(kern: KernelForm) -> float:
    """Maximal Bell-CHSH value ``2 sqrt(sign^2 + K^2)``."""
    return 2.0 * math.hypot(kern.sign, kern.K)


def optimal_settings(kern: KernelForm) -> BellSettings:
    """Angles attaining :func:`chi_max`.

    ``theta_a = 0``, ``theta_a' = pi/2``, ``theta_b = -theta_b' = theta`` with
    ``tan(theta) = K / sign``.
    """
    theta = math.atan2(kern.K, kern.sign)
    return BellSettings(0.0, theta, math.pi / 2, -theta, *kern.q_pair)


@singledispatch
def correlators(obj, q1: int, q2: int, ctrl: SeriesControl = DEFAULT) -> tuple[float, float]:
    """``(<S^z (x) S^z>, <S^x (x) S^x>)`` of a state or mixture at ``(q1, q2)``."""
    raise TypeError(f"no pseudospin correlators for {type(obj).__name__}")


@correlators.register
def _(obj: PhotonVariedState, q1: int, q2: int, ctrl: SeriesControl = DEFAULT):
    cv = coefficients(obj, ctrl)
    return zz_correlator(cv, q1, q2), xx_correlator(cv, q1, q2)


@correlators.register
def _(obj: CoefficientVector, q1: int, q2: int, ctrl: SeriesControl = DEFAULT):
    return zz_correlator(obj, q1, q2), xx_correlator(obj, q1, q2)


def correlation(obj, theta_a: float, theta_b: float, q1: int, q2: int,
                ctrl: SeriesControl = DEFAULT) -> float:
    """``E(theta_a, theta_b)`` for pseudospin measurements with indices ``q1, q2``."""
    zz, xx = correlators(obj, q1, q2, ctrl)
    return zz * math.cos(theta_a) * math.cos(theta_b) + xx * math.sin(theta_a) * math.sin(theta_b)


def chsh_from_correlators(zz: float, xx: float, s: BellSettings) -> float:
    def e(a, b):
        return zz * math.cos(a) * math.cos(b) + xx * math.sin(a) * math.sin(b)

    return (
        e(s.theta_a, s.theta_b)
        + e(s.theta_a, s.theta_b_prime)
        + e(s.theta_a_prime, s.theta_b)
        - e(s.theta_a_prime, s.theta_b_prime)
    )


def bell_chsh(obj, settings: BellSettings, ctrl: SeriesControl = DEFAULT) -> float:
    """CHSH combination E(a,b) + E(a,b') + E(a',b) - E(a',b')."""
    zz, xx = correlators(obj, settings.q1, settings.q2, ctrl)
    return chsh_from_correlators(zz, xx, settings)


def gain(chi_new: float, chi_ref: float) -> float:
    """Relative enhancement of a Bell value over a reference."""
    if chi_ref == 0:
        raise ZeroDivisionError("reference Bell value is zero")
    return (chi_new - chi_ref) / chi_ref


def chi_of(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> float:
    return chi_max(kernel(state, ctrl))
