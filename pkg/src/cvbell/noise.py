"""Photon-varied TMSV mixed with diagonal (classical) noise.

The noisy state is ``(1 - p) |psi><psi| + p * noise`` where the noise is
diagonal in the Fock basis, either a product ``mu (x) nu`` of single-mode
distributions or a classically correlated ``sum_n C_n |n, n><n, n|``.  Photon
operations act on mode 1 of both parts; ``p`` is kept as the mixing weight of
the resulting state.  Diagonal noise contributes only to ``<S^z (x) S^z>``,
so every correlation function has the form ``A cos cos + B sin sin``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.special import gammaln

from . import pseudospin
from .pseudospin import KernelForm, correlators, kernel, sz_eigenvalue
from .specfun import DEFAULT, ConvergenceError, SeriesControl, jacobi_theta
from .states import PhotonVariedState, coefficients

DIST_CTRL = SeriesControl(tolerance=1e-15, max_terms=1 << 22)

Policy = Literal["known", "unknown"]


@dataclass(frozen=True)
class Distribution:
    """Probability distribution over photon numbers 0, 1, 2, ...

    ``pmf`` maps an integer array to (possibly unnormalised) weights;
    ``support`` is the number of levels for finite distributions and ``None``
    for infinite ones, which are truncated adaptively on materialisation.
    """

    pmf: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    support: int | None = None
    label: str = ""

    def weights(self, n: np.ndarray) -> np.ndarray:
        """Unnormalised weights at levels ``n``, zero outside a finite support."""
        w = np.asarray(self.pmf(n), dtype=float)
        if self.support is not None:
            w = np.where(n < self.support, w, 0.0)
        return w

    def materialize(self, ctrl: SeriesControl = DIST_CTRL) -> np.ndarray:
        """Normalised weights up to a cutoff whose dropped tail is below tolerance."""
        if self.support is not None:
            w = np.asarray(self.pmf(np.arange(self.support)), dtype=float)
            total = w.sum()
            if not total > 0:
                raise ValueError(f"distribution {self.label!r} carries no weight")
            return w / total
        size = 64
        while size <= ctrl.max_terms:
            w = np.asarray(self.pmf(np.arange(size)), dtype=float)
            total = w.sum()
            if not total > 0:
                raise ValueError(f"distribution {self.label!r} carries no weight")
            if w[-1] == 0.0:
                return w / total
            rho = w[-1] / w[-2] if w[-2] > 0 else np.inf
            if rho < 1.0 and w[-1] * max(1.0, rho / (1.0 - rho)) < ctrl.tolerance * total:
                return w / total
            size *= 2
        raise ConvergenceError(
            f"distribution {self.label!r} tail not below {ctrl.tolerance} within "
            f"{ctrl.max_terms} levels"
        )


def point_mass(n0: int = 0) -> Distribution:
    return Distribution(lambda n: (n == n0).astype(float), n0 + 1, f"delta({n0})")


def uniform_dist(n_max: int) -> Distribution:
    """Uniform on 0..n_max."""
    return Distribution(lambda n: np.ones(len(n)), n_max + 1, f"uniform(0..{n_max})")


def thermal_dist(beta: float) -> Distribution:
    """Thermal photon statistics ``(1 - e^-beta) e^(-beta n)``."""
    if not beta > 0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    if math.isinf(beta):
        return point_mass(0)
    return Distribution(
        lambda n: -math.expm1(-beta) * np.exp(-beta * n), None, f"thermal(beta={beta})"
    )


def gaussian_dist(sigma: float) -> Distribution:
    """Weights ``exp(-n^2 / sigma^2)`` on n >= 0 (normaliser ``2 / (1 + theta_3)``)."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return Distribution(lambda n: np.exp(-(n.astype(float) ** 2) / sigma**2), None,
                        f"gaussian(sigma={sigma})")


def gaussian_parity(sigma: float, ctrl: SeriesControl = DEFAULT) -> float:
    """Closed form ``(1 + theta_4) / (1 + theta_3)`` at nome ``exp(-1/sigma^2)``."""
    q = math.exp(-1.0 / sigma**2)
    return (1 + jacobi_theta(4, q, ctrl)) / (1 + jacobi_theta(3, q, ctrl))


def parity_mean(dist: Distribution | np.ndarray) -> float:
    """``sum_n (-1)^n w_n``."""
    w = dist.materialize() if isinstance(dist, Distribution) else np.asarray(dist)
    signs = np.where(np.arange(len(w)) % 2 == 0, 1.0, -1.0)
    return float(np.dot(signs, w))


def _log_binom(n, k):
    return gammaln(n + k + 1) - gammaln(k + 1) - gammaln(n + 1)


def transform_noise_add(mu: Distribution, k: int) -> Distribution:
    """Weights of a diagonal mode after adding ``k`` photons: ``mu_n C(n+k, k)``.

    Level ``n`` of the result sits at photon number ``n + k``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return mu

    def pmf(n):
        return mu.weights(n) * np.exp(_log_binom(n.astype(float), k))

    return Distribution(pmf, mu.support, f"{mu.label}+{k}")


def transform_noise_sub(mu: Distribution, k: int) -> Distribution:
    """Weights after subtracting ``k`` photons: ``mu_(n+k) C(n+k, k)`` at level ``n``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return mu
    if mu.support is not None and mu.support <= k:
        raise ValueError(f"no weight left after removing {k} photons from {mu.label!r}")

    def pmf(n):
        return mu.weights(n + k) * np.exp(_log_binom(n.astype(float), k))

    support = None if mu.support is None else mu.support - k
    return Distribution(pmf, support, f"{mu.label}-{k}")


@dataclass(frozen=True)
class LocalNoise:
    mu: Distribution
    nu: Distribution


@dataclass(frozen=True)
class CorrelatedNoise:
    c: Distribution


@dataclass(frozen=True)
class NoisyStateModel:
    """``(1 - p) |pure><pure| + p * noise`` with the photon operation of ``pure``.

    ``pure`` must be a TMSV with photons added or subtracted on mode 1 only;
    the same operation is applied to the noise.
    """

    p: float
    pure: PhotonVariedState
    noise: LocalNoise | CorrelatedNoise
    policy: Policy = "known"

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"mixing probability must lie in [0, 1], got {self.p}")
        if self.pure.op2 != 0:
            raise ValueError("noisy states support photon operations on mode 1 only")
        if self.policy not in ("known", "unknown"):
            raise ValueError(f"unknown policy {self.policy!r}")

    @property
    def k(self) -> int:
        return self.pure.op1

    def with_k(self, k: int) -> "NoisyStateModel":
        return NoisyStateModel(self.p, PhotonVariedState(self.pure.x, k, 0), self.noise, self.policy)


@dataclass(frozen=True)
class ABForm:
    """Correlation weights ``E = A cos cos + B sin sin`` of a noisy state."""

    a_coeff: float
    b_coeff: float
    q_pair: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if abs(self.a_coeff) > 1 + 1e-12 or abs(self.b_coeff) > 1 + 1e-12:
            raise ValueError(f"|A|, |B| must not exceed 1, got {self.a_coeff}, {self.b_coeff}")


@dataclass(frozen=True)
class DiagonalPart:
    """Diagonal noise after the photon operation, in absolute photon numbers.

    Product form: ``w1[i]`` at mode-1 level ``start1 + i`` times ``w2[j]`` at
    mode-2 level ``j``.  Correlated form (``w2 is None``): ``w1[i]`` at
    ``|start1 + i, start1 + i + offset>``.
    """

    w1: np.ndarray
    start1: int
    w2: np.ndarray | None = None
    offset: int = 0

    def zz(self, q1: int, q2: int) -> float:
        lv = self.start1 + np.arange(len(self.w1))
        if self.w2 is None:
            z = sz_eigenvalue(q1, lv) * sz_eigenvalue(q2, lv + self.offset)
            return float(np.dot(self.w1, z))
        z1 = float(np.dot(self.w1, sz_eigenvalue(q1, lv)))
        z2 = float(np.dot(self.w2, sz_eigenvalue(q2, np.arange(len(self.w2)))))
        return z1 * z2


def noise_part(model: NoisyStateModel) -> DiagonalPart:
    """Diagonal noise of ``model`` with its photon operation applied."""
    k = model.k
    noise = model.noise
    if isinstance(noise, LocalNoise):
        if k >= 0:
            return DiagonalPart(transform_noise_add(noise.mu, k).materialize(), k,
                                noise.nu.materialize())
        return DiagonalPart(transform_noise_sub(noise.mu, -k).materialize(), 0,
                            noise.nu.materialize())
    if k >= 0:
        # C_n C(n+k, k) on |n + k, n>
        return DiagonalPart(transform_noise_add(noise.c, k).materialize(), k, offset=-k)
    # C_n C(n, k) on |n - k, n>, relabelled from n - k
    return DiagonalPart(transform_noise_sub(noise.c, -k).materialize(), 0, offset=-k)


@correlators.register
def _(obj: NoisyStateModel, q1: int, q2: int, ctrl: SeriesControl = DEFAULT):
    zz, xx = correlators(obj.pure, q1, q2, ctrl)
    p = obj.p
    return (1 - p) * zz + p * noise_part(obj).zz(q1, q2), (1 - p) * xx


def ab_of(model: NoisyStateModel, ctrl: SeriesControl = DEFAULT) -> ABForm:
    """``A`` and ``B`` at the pseudospin indices optimal for the pure part."""
    kern = kernel(model.pure, ctrl)
    a, b = correlators(model, *kern.q_pair, ctrl=ctrl)
    return ABForm(a, b, kern.q_pair)


def ab_printed(model: NoisyStateModel, ctrl: SeriesControl = DEFAULT) -> ABForm:
    """``A`` from the single-mode parity formulas, kept as a cross-check.

    Addition: ``(1-p) + p P(mu~) P(nu)``.  Subtraction:
    ``(1-p) + (-1)^k p P(mu~) sum_{m >= k mod 2} (-1)^m nu_m``.
    """
    if not isinstance(model.noise, LocalNoise):
        raise TypeError("the parity formulas cover local noise only")
    p, k = model.p, model.k
    kern = kernel(model.pure, ctrl)
    b = (1 - p) * kern.K
    nu = model.noise.nu.materialize()
    if k >= 0:
        mu = transform_noise_add(model.noise.mu, k).materialize()
        return ABForm((1 - p) + p * parity_mean(mu) * parity_mean(nu), b, kern.q_pair)
    k = -k
    mu = transform_noise_sub(model.noise.mu, k).materialize()
    lo = k % 2
    signs = np.where(np.arange(len(nu)) % 2 == 0, 1.0, -1.0)
    tail = float(np.dot(signs[lo:], nu[lo:]))
    return ABForm((1 - p) + (-1) ** k * p * parity_mean(mu) * tail, b, kern.q_pair)


def chi_known(ab: ABForm) -> float:
    """Bell value with settings optimised for the noisy state: ``2 sqrt(A^2 + B^2)``."""
    return 2.0 * math.hypot(ab.a_coeff, ab.b_coeff)


def chi_unknown(ab: ABForm, k_ref: float) -> float:
    """Bell value with settings optimal for a noiseless reference with weight ``k_ref``."""
    return 2.0 * (ab.a_coeff + k_ref * ab.b_coeff) / math.sqrt(1.0 + k_ref**2)


def reference_kernel(model: NoisyStateModel, ctrl: SeriesControl = DEFAULT) -> KernelForm:
    """Noiseless reference whose optimal settings are used when ``p`` is unknown.

    This is the TMSV at the same squeezing with ``|k|`` photons added.
    """
    return kernel(PhotonVariedState(model.pure.x, abs(model.k), 0), ctrl)


def chi_model(model: NoisyStateModel, ctrl: SeriesControl = DEFAULT) -> float:
    """Bell value of a noisy model under its own policy."""
    ab = ab_of(model, ctrl)
    if model.policy == "known":
        return chi_known(ab)
    return chi_unknown(ab, reference_kernel(model, ctrl).K)


def p_threshold(a: float, b: float, policy: Policy) -> float:
    """Largest mixing probability below which the Bell value exceeds 2.

    ``a`` is the drop of ``A`` per unit ``p`` (one minus the noise
    ``<S^z (x) S^z>``) and ``b`` the noiseless sine-sine weight.
    """
    if policy == "known":
        den = a * a + b * b
        if den == 0:
            return 0.0
        u = (a * (a - 1) + math.sqrt(max(a * (a - a * b * b + 2 * b * b), 0.0))) / den
        return min(max(1.0 - u, 0.0), 1.0)
    if policy == "unknown":
        s = math.sqrt(1 + b * b)
        den = a + b * b
        if den == 0:
            return 0.0
        return min(max(s * (s - 1) / den, 0.0), 1.0)
    raise ValueError(f"unknown policy {policy!r}")


def threshold_parameters(model: NoisyStateModel, ctrl: SeriesControl = DEFAULT) -> tuple[float, float]:
    """``(a, b)`` of a model family; ``model.p`` itself is ignored."""
    kern = kernel(model.pure, ctrl)
    zn = noise_part(model).zz(*kern.q_pair)
    return kern.sign - zn, kern.K


def correlated_critical_r(p: float) -> float:
    """Squeezing above which correlated noise still violates with ``p`` unknown.

    Defined for ``1/2 <= p <= 2 - sqrt(2)``; below the window every finite
    squeezing violates, above it not even the EPR limit does.
    """
    edge = 2 - math.sqrt(2)
    if not 0.5 <= p <= edge + 1e-15:
        raise ValueError(f"p must lie in [1/2, 2 - sqrt(2)], got {p}")
    if p >= edge - 1e-15:
        return math.inf
    arg = math.sqrt(2 * p - 1) / (1 - p)
    return 0.5 * math.atanh(arg)


def thermal_model(r: float, p: float, beta1: float, beta2: float, k: int = 0,
                  policy: Policy = "known") -> NoisyStateModel:
    return NoisyStateModel(p, PhotonVariedState.from_r(r, k, 0),
                           LocalNoise(thermal_dist(beta1), thermal_dist(beta2)), policy)


def gaussian_model(r: float, p: float, sigma1: float, sigma2: float, k: int = 0,
                   policy: Policy = "known") -> NoisyStateModel:
    return NoisyStateModel(p, PhotonVariedState.from_r(r, k, 0),
                           LocalNoise(gaussian_dist(sigma1), gaussian_dist(sigma2)), policy)


def correlated_model(r: float, p: float, c: Distribution | None = None, k: int = 0,
                     policy: Policy = "known") -> NoisyStateModel:
    c = thermal_dist(1.0) if c is None else c
    return NoisyStateModel(p, PhotonVariedState.from_r(r, k, 0), CorrelatedNoise(c), policy)
