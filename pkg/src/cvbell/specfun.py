"""Series evaluation of the special functions used by the closed forms.

Every routine sums its defining power series term by term and stops once a
tail bound drops below the requested tolerance.  Running out of terms is an
error, never a silent truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ConvergenceError(ArithmeticError):
    """A series did not reach its tail bound within the allowed terms."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy shared by every series in the package.

    ``tolerance`` bounds the neglected tail.  For series whose value exceeds
    one the bound is applied relative to the running sum, so sums that grow
    large (hypergeometric normalisers near ``x = 1``) still terminate.
    """

    tolerance: float = 1e-10
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT = SeriesControl()
STRICT = SeriesControl(tolerance=1e-14)


def sum_series(terms, ctrl: SeriesControl = DEFAULT, name: str = "series") -> float:
    """Sum an iterable of terms until the estimated tail is below tolerance.

    The tail after term ``t_n`` is estimated as ``|t_n| * rho / (1 - rho)``
    with ``rho = |t_n / t_(n-1)|``; summation stops when that estimate (and
    ``|t_n|`` itself) is below tolerance while the terms are decreasing.
    A term that is exactly zero after a nonzero one ends a terminating series.
    """
    total = 0.0
    prev = None
    for n, t in enumerate(terms):
        if n >= ctrl.max_terms:
            raise ConvergenceError(
                f"{name}: no convergence within {ctrl.max_terms} terms "
                f"(partial sum {total!r}, last term {prev!r})"
            )
        total += t
        a = abs(t)
        if prev is not None:
            if a == 0.0:
                return total
            rho = a / prev
            if rho < 1.0:
                tail = a * max(1.0, rho / (1.0 - rho))
                if tail < ctrl.tolerance * max(1.0, abs(total)):
                    return total
        elif a == 0.0 and n > 0:
            return total
        prev = a if a > 0.0 else prev
    return total


def gauss_2f1(a: float, b: float, c: float, x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for real |x| < 1."""
    if c <= 0 and float(c).is_integer():
        raise ValueError(f"2F1 undefined for c = {c}")
    if not -1.0 < x < 1.0:
        raise ValueError(f"2F1 series needs |x| < 1, got {x}")
    if x == 0.0:
        return 1.0

    def terms():
        t = 1.0
        n = 0
        while True:
            yield t
            t *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
            n += 1
            if t == 0.0:
                yield 0.0
                return

    return sum_series(terms(), ctrl, "2F1")


def lerch_phi(z: float, s: float, a: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Lerch transcendent sum_n z**n / (n + a)**s for 0 <= z < 1, a > 0."""
    if a <= 0:
        raise ValueError(f"lerch_phi needs a > 0, got {a}")
    if not 0.0 <= z < 1.0:
        raise ValueError(f"lerch_phi needs 0 <= z < 1, got {z}")
    if z == 0.0:
        return a ** (-s)

    def terms():
        zn = 1.0
        n = 0
        while True:
            yield zn / (n + a) ** s
            n += 1
            zn *= z

    return sum_series(terms(), ctrl, "Lerch Phi")


def _dilog_series(x: float, ctrl: SeriesControl) -> float:
    def terms():
        xn = x
        n = 1
        while True:
            yield xn / (n * n)
            n += 1
            xn *= x

    return sum_series(terms(), ctrl, "Li2")


def dilog(x: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Dilogarithm Li2(x) on [0, 1].

    The power series is used on [0, 1/2]; above that the reflection
    Li2(x) = pi^2/6 - ln(x) ln(1-x) - Li2(1-x) keeps the term count small.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"dilog needs 0 <= x <= 1, got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return math.pi**2 / 6
    if x <= 0.5:
        return _dilog_series(x, ctrl)
    return math.pi**2 / 6 - math.log(x) * math.log1p(-x) - _dilog_series(1.0 - x, ctrl)


def jacobi_theta(kind: int, q: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Jacobi theta_3 or theta_4 at zero argument with nome ``q``.

    theta_3(q) = 1 + 2 sum q^(n^2),  theta_4(q) = 1 + 2 sum (-1)^n q^(n^2).
    """
    if kind not in (3, 4):
        raise ValueError(f"only theta_3 and theta_4 are supported, got {kind}")
    if not 0.0 <= q < 1.0:
        raise ValueError(f"nome must satisfy 0 <= q < 1, got {q}")
    if q == 0.0:
        return 1.0
    lq = math.log(q)
    sign = -1.0 if kind == 4 else 1.0

    def terms():
        n = 1
        while True:
            yield 2.0 * sign**n * math.exp(n * n * lq)
            n += 1

    return 1.0 + sum_series(terms(), ctrl, f"theta_{kind}")
