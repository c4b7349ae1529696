"""Radical-expansion approximations of single-mode kernels and critical squeezing.

For ``k`` photons added to one mode,

    K_(k,0) = 2 (1-x)^(1+k) sqrt(x) / k! * sum_n x^(2n) prod_(i=2..k) (2n+i)
              * sqrt((2n+1)(2n+k+1)).

Replacing the square root by a truncated expansion gives an upper bound on
``K`` whose crossings locate the squeezing values where the Bell value of
``k`` and ``k'`` photons trade places.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pseudospin import kernel
from .specfun import DEFAULT, SeriesControl, dilog, gauss_2f1, lerch_phi, sum_series
from .states import PhotonVariedState

ROOT_WIDTH = 1e-8


def radical_approx(X: float, Y: float) -> float:
    """Second-order expansion of ``sqrt(X Y)`` about the arithmetic mean.

    ``sqrt(XY) = s/2 sqrt(1 - d^2/s^2)`` with ``s = X + Y``, ``d = X - Y``,
    truncated after the ``d^4`` term.  Always at least ``sqrt(XY)``.
    """
    s = X + Y
    u = (X - Y) ** 2 / (s * s)
    return 0.5 * s * (1.0 - 0.5 * u - 0.125 * u * u)


def _kernel_series(k: int, x: float, root: Callable[[float, float], float],
                   ctrl: SeriesControl) -> float:
    if x == 0.0:
        return 0.0
    x2 = x * x

    def terms():
        w = 1.0
        n = 0
        while True:
            m = 2 * n
            poly = math.prod(m + i for i in range(2, k + 1))
            yield w * poly * root(m + 1, m + k + 1)
            w *= x2
            n += 1

    pref = 2.0 * (1.0 - x) ** (1 + k) * math.sqrt(x) / math.factorial(k)
    return pref * sum_series(terms(), ctrl, f"K({k},0) series")


def k_series(k: int, x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Single-mode kernel from the square-root series (no approximation)."""
    return _kernel_series(k, x, lambda a, b: math.sqrt(a * b), ctrl)


def k_substituted(k: int, x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Single-mode kernel with :func:`radical_approx` in place of the square root."""
    return _kernel_series(k, x, radical_approx, ctrl)


def k1_closed(x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Closed form of the approximated ``k = 1`` kernel (hypergeometric + Lerch)."""
    y = x * x
    bracket = (3 + y) / (2 * (1 + x)) - (1 - x) ** 2 * (1 + x) * (
        gauss_2f1(0.75, 1.0, 1.75, y, ctrl) / 12 + lerch_phi(y, 3.0, 0.75, ctrl) / 2**10
    )
    return 2 * math.sqrt(x) / (1 + x) * bracket


def k2_closed(x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Closed form of the approximated ``k = 2`` kernel (dilogarithm)."""
    if x == 0.0:
        return 0.0
    y = x * x
    return (1 - x) ** 3 * math.sqrt(x) * (
        4 * (1 + y) / (1 - y) ** 3 - 1 / (2 * (1 - y)) - dilog(y, ctrl) / (32 * y)
    )


def k_approx(k: int, x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Approximated single-mode kernel for ``k`` in 1..4."""
    if k not in (1, 2, 3, 4):
        raise ValueError(f"approximations exist for k = 1..4, got {k}")
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    if k == 1:
        return k1_closed(x, ctrl)
    if k == 2:
        return k2_closed(x, ctrl)
    return k_substituted(k, x, ctrl)


def k_exact(k: int, x: float, ctrl: SeriesControl = DEFAULT) -> float:
    return kernel(PhotonVariedState(x, k, 0), ctrl).K


@dataclass(frozen=True)
class CriticalResult:
    x_critical: float
    r_critical: float
    bracket_width: float
    series: str = "approx"

    def __post_init__(self):
        if not 0.0 < self.x_critical < 1.0:
            raise ValueError(f"critical x must lie in (0, 1), got {self.x_critical}")


def find_crossing(f: Callable[[float], float], lo: float = 0.01, hi: float = 0.99,
                  steps: int = 98, width: float = ROOT_WIDTH, series: str = "approx"
                  ) -> CriticalResult:
    """Bisect the last sign change of ``f`` on a uniform scan of ``[lo, hi]``."""
    grid = np.linspace(lo, hi, steps + 1)
    vals = [f(float(x)) for x in grid]
    bracket = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            bracket = (grid[i], grid[i])
        elif vals[i] * vals[i + 1] < 0:
            bracket = (grid[i], grid[i + 1])
    if bracket is None:
        raise ValueError("no sign change on the scan grid")
    a, b = map(float, bracket)
    fa = f(a)
    while b - a > width:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            a = b = mid
            break
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    x = 0.5 * (a + b)
    return CriticalResult(x, math.atanh(math.sqrt(x)), b - a, series)


def _tmsv_k(x: float) -> float:
    return 2 * math.sqrt(x) / (1 + x)


def _pick(exact: bool):
    return k_exact if exact else k_approx


def critical_theorem1(exact: bool = False, ctrl: SeriesControl = DEFAULT) -> CriticalResult:
    """Squeezing above which one added photon lowers the Bell value."""
    kf = _pick(exact)
    return find_crossing(lambda x: kf(1, x, ctrl) - _tmsv_k(x),
                         series="exact" if exact else "approx")


def _pair_crossing(k_hi: int, k_lo: int, exact: bool, ctrl: SeriesControl) -> CriticalResult:
    kf = _pick(exact)
    return find_crossing(lambda x: kf(k_hi, x, ctrl) - kf(k_lo, x, ctrl),
                         series="exact" if exact else "approx")


def critical_prop1(exact: bool = False, ctrl: SeriesControl = DEFAULT) -> CriticalResult:
    """Squeezing above which two added photons beat one."""
    return _pair_crossing(2, 1, exact, ctrl)


def critical_prop2(exact: bool = False, ctrl: SeriesControl = DEFAULT) -> CriticalResult:
    """Squeezing above which four added photons beat two."""
    return _pair_crossing(4, 2, exact, ctrl)


def critical_prop3(exact: bool = False, ctrl: SeriesControl = DEFAULT) -> CriticalResult:
    """Squeezing above which three added photons beat one."""
    return _pair_crossing(3, 1, exact, ctrl)


CRITICALS = {
    "theorem1": critical_theorem1,
    "prop1": critical_prop1,
    "prop2": critical_prop2,
    "prop3": critical_prop3,
}
