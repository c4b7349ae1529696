"""Brute-force reference computations in a truncated Fock space.

States are built by applying ladder operators to an explicitly truncated
two-mode squeezed vacuum; pseudospin operators are explicit sparse
matrices; Bell values come from numeric optimisation over measurement
angles or from the correlation-matrix eigenvalue bound.  Nothing here
reuses the closed-form coefficient or kernel code.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from .imperfect import FaultyGenerator, SuppressionModel, suppression_weights
from .noise import CorrelatedNoise, LocalNoise, NoisyStateModel
from .pseudospin import Q_WINDOW, BellSettings
from .states import PhotonVariedState

TAIL_LIMIT = 1e-12
MAX_CUTOFF = 4096
GRID = 24


class TruncationError(RuntimeError):
    """The requested cutoff leaves more than the admitted tail mass."""

    def __init__(self, tail: float, cutoff: int):
        super().__init__(f"tail mass {tail:.3e} beyond cutoff N={cutoff} exceeds {TAIL_LIMIT:g}")
        self.tail = tail
        self.cutoff = cutoff


@dataclass(frozen=True)
class TruncatedOperator:
    """Real sparse matrix on levels ``0..cutoff-1``.

    If ``imaginary`` is set the operator is ``-1j * matrix`` (used for ``S^y``).
    """

    cutoff: int
    matrix: sp.csr_matrix
    imaginary: bool = False

    def dense(self) -> np.ndarray:
        m = self.matrix.toarray()
        return -1j * m if self.imaginary else m


def pseudospin_matrices(q: int, N: int) -> tuple[TruncatedOperator, TruncatedOperator, TruncatedOperator]:
    """``(S^z, S^x, S^y)`` for pairs ``(2n+q, 2n+q+1)`` with ``2n+q >= 0``.

    Pairs whose upper level is not below ``N`` are dropped.
    """
    if N < abs(q) + 4:
        raise ValueError(f"cutoff N={N} too small for q={q}; need at least {abs(q) + 4}")
    lo = np.arange(q % 2 if q < 0 else q, N - 1, 2)
    hi = lo + 1
    z = np.zeros(N)
    z[lo] = -1.0
    z[hi] = 1.0
    sz = sp.diags(z, format="csr")
    ones = np.ones(len(lo))
    # S^+ = sum |lo><hi|... raising within each pair: |hi><lo|
    splus = sp.csr_matrix((ones, (hi, lo)), shape=(N, N))
    sx = (splus + splus.T).tocsr()
    sy_real = (splus - splus.T).tocsr()
    return (TruncatedOperator(N, sz), TruncatedOperator(N, sx),
            TruncatedOperator(N, sy_real, imaginary=True))


# ---------------------------------------------------------------- states

@dataclass(frozen=True)
class PureComponent:
    amplitudes: np.ndarray  # psi[n1, n2], real, unit norm


@dataclass(frozen=True)
class DiagonalComponent:
    weights: np.ndarray  # w[n1, n2] >= 0, sums to 1


@dataclass(frozen=True)
class OracleState:
    """Convex mixture of truncated components at a common cutoff."""

    cutoff: int
    components: tuple
    weights: tuple
    tail: float = 0.0


def _ladder(psi: np.ndarray, op: int, axis: int) -> np.ndarray:
    """Apply ``a^dagger^op`` (op > 0) or ``a^(-op)`` (op < 0) on one axis, unnormalised."""
    out = np.moveaxis(psi, axis, 0).copy()
    L = out.shape[0]
    n = np.arange(L, dtype=float)
    for _ in range(abs(op)):
        new = np.zeros_like(out)
        if op > 0:
            new[1:] = np.sqrt(n[1:])[:, None] * out[:-1]
        else:
            new[:-1] = np.sqrt(n[1:])[:, None] * out[1:]
        out = new
    return np.moveaxis(out, 0, axis)


def _tmsv(x: float, L: int) -> np.ndarray:
    n = np.arange(L)
    psi = np.zeros((L, L))
    psi[n, n] = np.sqrt(1 - x) * x ** (n / 2)
    return psi


def _truncate(mat: np.ndarray, N: int, squared: bool) -> tuple[np.ndarray, float]:
    mass = mat**2 if squared else mat
    total = mass.sum()
    kept = mass[:N, :N].sum()
    tail = float((total - kept) / total)
    out = mat[:N, :N]
    return out / (math.sqrt(kept) if squared else kept), tail


def _pure_amplitudes(x: float, op1: int, op2: int, N: int) -> tuple[np.ndarray, float]:
    L = 2 * N + abs(op1) + abs(op2)
    psi = _ladder(_ladder(_tmsv(x, L), op1, 0), op2, 1)
    return _truncate(psi, N, squared=True)


def _diag_ladder(w: np.ndarray, op: int, axis: int) -> np.ndarray:
    """Ladder action on a diagonal density: populations move with weight ``n!/(n-k)!``."""
    out = np.moveaxis(w, axis, 0).copy()
    n = np.arange(out.shape[0], dtype=float)
    for _ in range(abs(op)):
        new = np.zeros_like(out)
        if op > 0:
            new[1:] = n[1:, None] * out[:-1]
        else:
            new[:-1] = n[1:, None] * out[1:]
        out = new
    return np.moveaxis(out, 0, axis)


def _noise_weights(noise, op1: int, N: int) -> tuple[np.ndarray, float]:
    L = 2 * N + abs(op1)
    n = np.arange(L)
    if isinstance(noise, LocalNoise):
        mu = noise.mu.weights(n)
        nu = noise.nu.weights(n)
        w = np.outer(mu / mu.sum(), nu / nu.sum())
    elif isinstance(noise, CorrelatedNoise):
        c = noise.c.weights(n)
        w = np.diag(c / c.sum())
    else:
        raise TypeError(f"unsupported noise {type(noise).__name__}")
    return _truncate(_diag_ladder(w, op1, 0), N, squared=False)


def _admit(build, N: int | None, auto: bool):
    """Run ``build(N)`` and double N until the tail mass is admissible."""
    n = 64 if N is None else N
    while True:
        result, tail = build(n)
        if tail < TAIL_LIMIT:
            return result, tail, n
        if not auto or 2 * n > MAX_CUTOFF:
            raise TruncationError(tail, n)
        n *= 2


def materialize(obj, N: int | None = None, auto: bool = True) -> OracleState:
    """Truncated representation of a pure state, noisy model or an ``OracleMixture``."""
    if isinstance(obj, OracleMixture):
        parts = [materialize(c, N, auto) for c in obj.items]
        cut = max(p.cutoff for p in parts)
        parts = [materialize(c, cut, False) if p.cutoff != cut else p
                 for c, p in zip(obj.items, parts)]
        comps, wts = [], []
        for w, part in zip(obj.weights, parts):
            comps.extend(part.components)
            wts.extend(w * v for v in part.weights)
        return OracleState(cut, tuple(comps), tuple(wts), max(p.tail for p in parts))
    if isinstance(obj, PhotonVariedState):
        psi, tail, n = _admit(lambda m: _pure_amplitudes(obj.x, obj.op1, obj.op2, m), N, auto)
        return OracleState(n, (PureComponent(psi),), (1.0,), tail)
    if isinstance(obj, NoisyStateModel):
        pure = obj.pure

        def build(m):
            psi, t1 = _pure_amplitudes(pure.x, pure.op1, 0, m)
            w, t2 = _noise_weights(obj.noise, pure.op1, m)
            return (psi, w), max(t1, t2)

        (psi, w), tail, n = _admit(build, N, auto)
        return OracleState(n, (PureComponent(psi), DiagonalComponent(w)),
                           (1 - obj.p, obj.p), tail)
    raise TypeError(f"cannot materialise {type(obj).__name__}")


@dataclass(frozen=True)
class OracleMixture:
    """Weighted list of states to be materialised together."""

    items: tuple
    weights: tuple


def imperfect_mixture(base, k: int, sup: SuppressionModel) -> OracleMixture:
    """Explicit ``sum_i p_i rho_(k-i)`` for a noisy model or a faulty source."""
    w = suppression_weights(sup)
    shrink = [k - i if k >= 0 else k + i for i in range(len(w))]
    if isinstance(base, NoisyStateModel):
        items = tuple(base.with_k(s) for s in shrink)
    elif isinstance(base, FaultyGenerator):
        items = tuple(PhotonVariedState.from_r(base.r_actual, s, 0) for s in shrink)
    else:
        raise TypeError(f"unsupported base {type(base).__name__}")
    return OracleMixture(items, tuple(float(v) for v in w))


# ---------------------------------------------------------------- correlators

def correlation_matrix(state: OracleState, q1: int, q2: int) -> np.ndarray:
    """``T_ij = <S^i_q1 (x) S^j_q2>`` for ``i, j`` in (z, x, y)."""
    ops1 = pseudospin_matrices(q1, state.cutoff)
    ops2 = pseudospin_matrices(q2, state.cutoff)
    T = np.zeros((3, 3))
    for comp, wt in zip(state.components, state.weights):
        if wt == 0:
            continue
        for i, a in enumerate(ops1):
            for j, b in enumerate(ops2):
                if isinstance(comp, PureComponent):
                    psi = comp.amplitudes
                    val = np.sum(psi * (a.matrix @ (b.matrix @ psi.T).T))
                    phase = (-1j if a.imaginary else 1) * (-1j if b.imaginary else 1)
                    val = (phase * val).real
                else:
                    da = a.matrix.diagonal()
                    db = b.matrix.diagonal()
                    val = 0.0 if (a.imaginary or b.imaginary) else da @ comp.weights @ db
                T[i, j] += wt * val
    return T


def bell_value(state: OracleState, settings: BellSettings) -> float:
    """CHSH value at fixed angles in the z-x plane."""
    T = correlation_matrix(state, settings.q1, settings.q2)[:2, :2]

    def e(a, b):
        return np.array([math.cos(a), math.sin(a)]) @ T @ np.array([math.cos(b), math.sin(b)])

    s = settings
    return float(e(s.theta_a, s.theta_b) + e(s.theta_a, s.theta_b_prime)
                 + e(s.theta_a_prime, s.theta_b) - e(s.theta_a_prime, s.theta_b_prime))


def _chsh(T2: np.ndarray, ang: np.ndarray) -> float:
    a, ap, b, bp = ang
    u = lambda t: np.array([math.cos(t), math.sin(t)])  # noqa: E731
    return float(u(a) @ T2 @ (u(b) + u(bp)) + u(ap) @ T2 @ (u(b) - u(bp)))


def optimise_angles(T2: np.ndarray, grid: int = GRID, tol: float = 1e-10,
                    max_sweeps: int = 500) -> tuple[float, np.ndarray]:
    """Maximise CHSH over four z-x plane angles for a 2x2 correlation block."""
    th = np.linspace(-math.pi, math.pi, grid, endpoint=False)
    U = np.stack([np.cos(th), np.sin(th)], axis=1)
    E = U @ T2 @ U.T  # E[alice, bob]
    vals = (E[:, None, :, None] + E[:, None, None, :]
            + E[None, :, :, None] - E[None, :, None, :])
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    ang = th[list(idx)].astype(float)
    best = _chsh(T2, ang)
    h = 2 * math.pi / grid
    for _ in range(max_sweeps):
        prev = best
        for c in range(4):
            def neg(t, c=c):
                trial = ang.copy()
                trial[c] = t
                return -_chsh(T2, trial)

            res = minimize_scalar(neg, bounds=(ang[c] - h, ang[c] + h),
                                  method="bounded", options={"xatol": 1e-12})
            if -res.fun > best:
                ang[c] = res.x
                best = -res.fun
        if best - prev < tol:
            break
    return best, ang


def chi_numeric(state: OracleState, grid: int = GRID,
                q_pair: tuple[int, int] | None = None) -> float:
    """Maximal CHSH value over z-x plane settings and ``(q1, q2)`` in the window."""
    pairs = [q_pair] if q_pair else itertools.product(Q_WINDOW, Q_WINDOW)
    best = -math.inf
    for q1, q2 in pairs:
        T2 = correlation_matrix(state, q1, q2)[:2, :2]
        best = max(best, optimise_angles(T2, grid)[0])
    return best


def chi_eigen(state: OracleState, q_pair: tuple[int, int] | None = None) -> float:
    """``2 sqrt(l1 + l2)`` from the two largest eigenvalues of ``T^T T``."""
    pairs = [q_pair] if q_pair else itertools.product(Q_WINDOW, Q_WINDOW)
    best = -math.inf
    for q1, q2 in pairs:
        T = correlation_matrix(state, q1, q2)
        ev = np.sort(np.linalg.eigvalsh(T.T @ T))
        best = max(best, 2 * math.sqrt(max(ev[-1] + ev[-2], 0.0)))
    return best


def schmidt_spectrum(state: OracleState) -> np.ndarray:
    """Squared singular values of a pure oracle state, descending."""
    if len(state.components) != 1 or not isinstance(state.components[0], PureComponent):
        raise TypeError("Schmidt spectrum needs a single pure component")
    s = np.linalg.svd(state.components[0].amplitudes, compute_uv=False)
    return s**2


def verify_point(x: float, op1: int, op2: int, N: int | None = 200,
                 auto: bool = False) -> dict:
    """Closed-form, numeric and eigenvalue Bell values for one pure state."""
    from .pseudospin import chi_of

    st = PhotonVariedState(x, op1, op2)
    rho = materialize(st, N, auto)
    return {
        "x": x, "op1": op1, "op2": op2, "cutoff": rho.cutoff, "tail": rho.tail,
        "closed": chi_of(st), "numeric": chi_numeric(rho), "eigen": chi_eigen(rho),
    }


def verify_grid(xs: Sequence[float], ops: Sequence[tuple[int, int]], N: int | None = 200,
                auto: bool = False) -> list[dict]:
    return [verify_point(x, a, b, N, auto) for x in xs for a, b in ops]
