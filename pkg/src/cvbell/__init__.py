"""Pseudospin Bell violation of photon-added and photon-subtracted two-mode squeezed vacuum."""

from .pseudospin import BellSettings, KernelForm, bell_chsh, chi_max, chi_of, kernel, optimal_settings
from .specfun import ConvergenceError, SeriesControl
from .states import CoefficientVector, PhotonVariedState, coefficients

__all__ = [
    "BellSettings", "CoefficientVector", "ConvergenceError", "KernelForm", "PhotonVariedState",
    "SeriesControl", "bell_chsh", "chi_max", "chi_of", "coefficients", "kernel",
    "optimal_settings",
]
