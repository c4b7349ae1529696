"""Fock coefficients of two-mode squeezed vacuum with photons added or subtracted.

A photon-varied state is always of the form ``sum_i c_i |m_i, m_i + d>`` with
``m_i = start + i``: the photon-number difference ``d`` between the modes is
fixed, so a single real vector describes the whole state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .specfun import DEFAULT, ConvergenceError, SeriesControl, gauss_2f1


@dataclass(frozen=True)
class PhotonVariedState:
    """TMSV with squeezing fraction ``x = tanh(r)**2`` and per-mode photon counts.

    ``op1``/``op2`` count photons added (positive) or subtracted (negative) in
    mode 1 and mode 2.  Mixed addition/subtraction is not a valid state here.
    """

    x: float
    op1: int = 0
    op2: int = 0

    def __post_init__(self):
        if not 0.0 <= self.x < 1.0:
            raise ValueError(f"squeezing fraction must lie in [0, 1), got {self.x}")
        if self.op1 * self.op2 < 0:
            raise ValueError(
                f"mixed addition/subtraction ({self.op1}, {self.op2}) is not supported"
            )

    @classmethod
    def from_r(cls, r: float, op1: int = 0, op2: int = 0) -> "PhotonVariedState":
        if not r >= 0.0:
            raise ValueError(f"squeezing must be nonnegative, got {r}")
        return cls(math.tanh(r) ** 2, op1, op2)

    @property
    def r(self) -> float:
        return math.atanh(math.sqrt(self.x))

    @property
    def is_subtraction(self) -> bool:
        return self.op1 < 0 or self.op2 < 0

    def swapped(self) -> "PhotonVariedState":
        return PhotonVariedState(self.x, self.op2, self.op1)


@dataclass(frozen=True)
class CoefficientVector:
    """Normalised coefficients ``entries[i]`` of ``|start + i, start + i + offset>``.

    ``deficit`` is the norm missing before the explicit renormalisation that
    follows truncation (dropped tail plus normaliser error).
    """

    start: int
    offset: int
    entries: np.ndarray
    deficit: float = 0.0

    @property
    def cutoff(self) -> int:
        return len(self.entries)

    def mode1_levels(self) -> np.ndarray:
        return self.start + np.arange(self.cutoff)

    def mode2_levels(self) -> np.ndarray:
        return self.start + self.offset + np.arange(self.cutoff)

    def swapped(self) -> "CoefficientVector":
        return CoefficientVector(self.start + self.offset, -self.offset, self.entries, self.deficit)


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _adaptive_cutoff(log_weight, ctrl: SeriesControl) -> int:
    """Smallest cutoff whose dropped tail of ``exp(log_weight(n))`` is below tolerance.

    The term ratio of every weight family handled here decreases in ``n``, so
    once it is below one the tail after term ``n`` is at most
    ``w_n * rho / (1 - rho)``.
    """
    size = 64
    while True:
        if size > ctrl.max_terms:
            raise ConvergenceError(
                f"coefficient tail not below {ctrl.tolerance} within {ctrl.max_terms} terms"
            )
        lw = log_weight(np.arange(size, dtype=float))
        w = np.exp(lw - lw.max())
        rho = np.exp(np.diff(lw))
        with np.errstate(divide="ignore"):
            factor = np.where(rho < 1.0, np.maximum(1.0, rho / (1.0 - rho)), np.inf)
        ok = (rho < 1.0) & (w[1:] * factor < ctrl.tolerance * w.sum())
        if ok[-1]:
            # first index from which the bound holds all the way to the end
            bad = np.flatnonzero(~ok)
            first = bad[-1] + 1 if bad.size else 0
            return int(first) + 2
        size *= 2


def _canonical(state: PhotonVariedState) -> tuple[PhotonVariedState, bool]:
    if abs(state.op2) > abs(state.op1):
        return state.swapped(), True
    return state, False


def normaliser(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> float:
    """Hypergeometric normaliser of the unnormalised coefficient weights."""
    st, _ = _canonical(state)
    k, l = abs(st.op1), abs(st.op2)
    if st.is_subtraction:
        return gauss_2f1(k + 1, k + 1, 1 + k - l, st.x, ctrl)
    return gauss_2f1(k + 1, l + 1, 1, st.x, ctrl)


def coefficients(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> CoefficientVector:
    """Normalised Fock coefficients with an adaptive cutoff.

    Inputs with more photons on mode 2 than on mode 1 are evaluated on the
    mode-swapped state and swapped back.
    """
    st, swap = _canonical(state)
    k, l, x = abs(st.op1), abs(st.op2), st.x

    if x == 0.0:
        # only the lowest term survives
        entries = np.array([1.0])
        cv = (
            CoefficientVector(0, k - l, entries)
            if st.is_subtraction
            else CoefficientVector(k, l - k, entries)
        )
        return cv.swapped() if swap else cv

    lx = math.log(x)
    if st.is_subtraction:
        # |j, j + k - l> carries x^j C(j+k, k) C(j+k, l) / C(k, l)
        def log_weight(j):
            return j * lx + _log_binom(j + k, k) + _log_binom(j + k, l) - _log_binom(k, l)

        start, offset = 0, k - l
    else:
        # |n + k, n + l> carries x^n C(n+k, k) C(n+l, l)
        def log_weight(n):
            return n * lx + _log_binom(n + k, k) + _log_binom(n + l, l)

        start, offset = k, l - k

    lw0 = log_weight(np.arange(_adaptive_cutoff(log_weight, ctrl), dtype=float))
    # rescale to the true weights so the deficit against 2F1 can be reported
    shift = lw0.max()
    kept = np.exp(lw0 - shift).sum()
    norm = normaliser(st, ctrl)
    deficit = 1.0 - kept * math.exp(shift) / norm
    entries = np.sqrt(np.exp(lw0 - shift) / kept)
    cv = CoefficientVector(start, offset, entries, deficit)
    return cv.swapped() if swap else cv


def equivalent_addition_form(state: PhotonVariedState) -> PhotonVariedState:
    """Rewrite single-mode subtraction as addition on the other mode.

    Subtracting ``k`` photons from one mode of a TMSV gives exactly the state
    obtained by adding ``k`` photons to the other mode.
    """
    if state.op1 != 0 and state.op2 != 0:
        raise ValueError("equivalent_addition_form needs a single-mode operation")
    if state.op1 < 0:
        return PhotonVariedState(state.x, 0, -state.op1)
    if state.op2 < 0:
        return PhotonVariedState(state.x, -state.op2, 0)
    return state


def schmidt_spectrum(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> np.ndarray:
    return coefficients(state, ctrl).entries ** 2


def entanglement_entropy(state: PhotonVariedState, ctrl: SeriesControl = DEFAULT) -> float:
    """Von Neumann entropy (natural log) of either reduced state."""
    lam = schmidt_spectrum(state, ctrl)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))
