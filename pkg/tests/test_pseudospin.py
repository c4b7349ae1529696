import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvbell.oracle import chi_numeric, materialize
from cvbell.pseudospin import (
    BellSettings,
    KernelForm,
    bell_chsh,
    chi_max,
    chi_of,
    correlators,
    gain,
    kernel,
    optimal_settings,
    pair_options,
    sz_eigenvalue,
    unit_sign_kernel,
    xx_correlator,
    zz_correlator,
)
from cvbell.specfun import STRICT
from cvbell.states import PhotonVariedState, coefficients

states = st.builds(
    lambda x, k, l, s: PhotonVariedState(x, s * k, s * l),
    st.floats(0.0, 0.9), st.integers(0, 5), st.integers(0, 5), st.sampled_from([1, -1]),
)


def test_sz_pairs_levels():
    assert list(sz_eigenvalue(0, np.arange(4))) == [-1, 1, -1, 1]
    assert list(sz_eigenvalue(1, np.arange(5))) == [0, -1, 1, -1, 1]
    assert list(sz_eigenvalue(-1, np.arange(5))) == list(sz_eigenvalue(1, np.arange(5)))


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0, 2.0])
def test_tmsv_kernel_is_tanh_2r(r):
    kern = kernel(PhotonVariedState.from_r(r), STRICT)
    assert kern.K == pytest.approx(math.tanh(2 * r), abs=1e-12)
    assert kern.sign == pytest.approx(1.0)
    assert chi_max(kern) == pytest.approx(2 * math.sqrt(1 + math.tanh(2 * r) ** 2), abs=1e-11)


# mpmath: 2 sum c_2n c_2n+1 from c_n^2 ~ x^n C(n+k, k)
@pytest.mark.parametrize("k x expected".split(), [
    (1, 0.25, 0.930430624238302159),
    (2, 0.5, 0.985266091700361511),
    (3, 0.8, 0.997048859338189329),
    (4, 0.1, 0.924257007458186637),
])
def test_single_mode_kernel_reference(k, x, expected):
    kern = kernel(PhotonVariedState(x, k, 0), STRICT)
    assert kern.K == pytest.approx(expected, abs=1e-11)
    assert kern.q_pair == (k % 2, 0)


def test_kernel_form_validation():
    with pytest.raises(ValueError):
        KernelForm(1.0, 1.5, (0, 0))


@given(states)
@settings(max_examples=80, deadline=None)
def test_kernel_consistent_with_correlators(state):
    kern = kernel(state)
    cv = coefficients(state)
    assert kern.sign == pytest.approx(zz_correlator(cv, *kern.q_pair), abs=1e-12)
    assert kern.K == pytest.approx(xx_correlator(cv, *kern.q_pair), abs=1e-12)
    assert chi_max(kern) <= 2 * math.sqrt(2) + 1e-12


@given(states)
@settings(max_examples=60, deadline=None)
def test_optimal_settings_attain_maximum(state):
    kern = kernel(state)
    assert bell_chsh(state, optimal_settings(kern)) == pytest.approx(chi_max(kern), abs=1e-12)


@given(states, st.sampled_from([(-1, 1), (-2, 0)]), st.sampled_from([(-1, 1), (-2, 0), (0, 0)]))
@settings(max_examples=40, deadline=None)
def test_negative_q_duplicates_nonnegative(state, qa, qb):
    lhs = correlators(state, qa[0], qb[0])
    rhs = correlators(state, qa[1], qb[1])
    assert lhs == pytest.approx(rhs, abs=1e-14)


def test_cross_settings_give_classical_bound_for_product_state():
    s = BellSettings(0.0, math.pi / 4, math.pi / 2, -math.pi / 4)
    assert bell_chsh(PhotonVariedState(0.0), s) == pytest.approx(math.sqrt(2))
    assert chi_of(PhotonVariedState(0.0)) == pytest.approx(2.0)


def test_pair_options_cover_support_for_addition():
    opts = pair_options(coefficients(PhotonVariedState(0.3, 3, 1)))
    assert max(o.sign for o in opts) == pytest.approx(1.0)


def test_distributed_kernels():
    add = kernel(PhotonVariedState(0.25, 2, 1))
    sub = kernel(PhotonVariedState(0.25, -2, -1))
    assert add.q_pair == (0, 1) and sub.q_pair == (0, 1)
    assert kernel(PhotonVariedState(0.25, 1, 2)).q_pair == (1, 0)


@pytest.mark.parametrize("r", [0.2, 0.5, 1.0])
@pytest.mark.parametrize("k", [1, 2])
def test_equal_split_addition_matches_subtraction(r, k):
    assert chi_of(PhotonVariedState.from_r(r, k, k)) == pytest.approx(
        chi_of(PhotonVariedState.from_r(r, -k, -k)), abs=1e-12)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_equal_split_unit_sign_kernels_coincide(k):
    x = math.tanh(0.5) ** 2
    a = unit_sign_kernel(PhotonVariedState(x, k, k))
    b = unit_sign_kernel(PhotonVariedState(x, -k, -k))
    assert a.K == pytest.approx(b.K, abs=1e-14)


def test_equal_split_subtraction_loses_unpaired_vacuum():
    # the pairing that wins for (5, 5) leaves the vacuum unpaired after subtraction
    add = PhotonVariedState.from_r(0.5, 5, 5)
    sub = PhotonVariedState.from_r(0.5, -5, -5)
    assert chi_of(add) - chi_of(sub) == pytest.approx(1.74e-3, abs=1e-5)
    assert chi_max(unit_sign_kernel(sub)) > chi_of(sub)
    assert chi_of(sub) == pytest.approx(chi_numeric(materialize(sub, 200, auto=False)), abs=1e-8)
    assert chi_of(add) == pytest.approx(chi_numeric(materialize(add, 200, auto=False)), abs=1e-8)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_single_mode_addition_matches_subtraction(k):
    x = 0.6
    assert chi_of(PhotonVariedState(x, k, 0)) == pytest.approx(
        chi_of(PhotonVariedState(x, -k, 0)), abs=1e-12)


def test_distributed_point_matches_oracle():
    state = PhotonVariedState(0.25, 2, 1)
    assert chi_of(state) == pytest.approx(chi_numeric(materialize(state, 120, auto=False)), abs=1e-7)


def test_gain():
    assert gain(2.2, 2.0) == pytest.approx(0.1)
    with pytest.raises(ZeroDivisionError):
        gain(1.0, 0.0)
