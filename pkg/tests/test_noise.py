import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvbell.noise import (
    ABForm,
    CorrelatedNoise,
    LocalNoise,
    NoisyStateModel,
    ab_of,
    ab_printed,
    chi_known,
    chi_model,
    chi_unknown,
    correlated_critical_r,
    correlated_model,
    gaussian_dist,
    gaussian_model,
    gaussian_parity,
    parity_mean,
    p_threshold,
    point_mass,
    reference_kernel,
    thermal_dist,
    thermal_model,
    threshold_parameters,
    transform_noise_add,
    transform_noise_sub,
    uniform_dist,
)
from cvbell.oracle import chi_eigen, chi_numeric, materialize
from cvbell.pseudospin import kernel
from cvbell.specfun import STRICT
from cvbell.states import PhotonVariedState


def test_point_mass_parity():
    assert parity_mean(point_mass(0)) == 1.0
    assert parity_mean(point_mass(3)) == -1.0


@pytest.mark.parametrize("beta", [0.2, 1.0, 3.0, 10.0])
def test_thermal_parity_is_tanh(beta):
    w = thermal_dist(beta).materialize()
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert parity_mean(w) == pytest.approx(math.tanh(beta / 2), abs=1e-12)


def test_thermal_zero_temperature_is_vacuum():
    assert np.array_equal(thermal_dist(math.inf).materialize(), [1.0])
    with pytest.raises(ValueError):
        thermal_dist(0.0)


# alternating sums evaluated with mpmath
@pytest.mark.parametrize("sigma expected".split(), [
    (0.7, 0.770090690106354267),
    (1.5, 0.278963087405982652),
    (3.0, 0.158293932374785277),
])
def test_gaussian_parity(sigma, expected):
    assert parity_mean(gaussian_dist(sigma)) == pytest.approx(expected, abs=1e-12)
    assert gaussian_parity(sigma, STRICT) == pytest.approx(expected, abs=1e-12)


def test_narrow_gaussian_is_vacuum():
    w = gaussian_dist(0.05).materialize()
    assert w[0] == pytest.approx(1.0)


def test_transform_identities():
    mu = thermal_dist(2.0)
    assert transform_noise_add(mu, 0) is mu
    assert transform_noise_sub(mu, 0) is mu
    assert np.allclose(transform_noise_add(point_mass(0), 4).materialize(), [1.0])
    assert transform_noise_sub(point_mass(3), 3).materialize()[0] == 1.0
    with pytest.raises(ValueError):
        transform_noise_sub(point_mass(2), 3)


def test_transform_thermal_reference():
    # direct normalised sums of mu_n C(n+2, 2) and mu_(n+1) C(n+1, 1) at beta = 3
    add = transform_noise_add(thermal_dist(3.0), 2).materialize()
    sub = transform_noise_sub(thermal_dist(3.0), 1).materialize()
    assert add[:3] == pytest.approx([0.857951641622320567, 0.128144691113314734,
                                     0.0127598969948748155], abs=1e-14)
    assert sub[:3] == pytest.approx([0.902904615440938472, 0.0899059476372358114,
                                     0.00671423034253898260], abs=1e-14)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_thermal_added_parity(k):
    beta = 2.0
    w = transform_noise_add(thermal_dist(beta), k).materialize()
    assert parity_mean(w) == pytest.approx(math.tanh(beta / 2) ** (k + 1), abs=1e-12)


def test_model_validation():
    pure = PhotonVariedState(0.3)
    noise = LocalNoise(thermal_dist(1.0), thermal_dist(1.0))
    with pytest.raises(ValueError):
        NoisyStateModel(1.2, pure, noise)
    with pytest.raises(ValueError):
        NoisyStateModel(0.2, PhotonVariedState(0.3, 1, 1), noise)
    with pytest.raises(ValueError):
        NoisyStateModel(0.2, pure, noise, policy="sometimes")
    with pytest.raises(ValueError):
        ABForm(1.5, 0.0)


def test_noiseless_limit():
    m = thermal_model(0.6, 0.0, 1.0, 2.0, k=3)
    kern = kernel(m.pure)
    ab = ab_of(m)
    assert (ab.a_coeff, ab.b_coeff) == pytest.approx((kern.sign, kern.K))
    assert chi_unknown(ab, kern.K) == pytest.approx(chi_known(ab))


@pytest.mark.parametrize("r p b1 b2".split(), [(0.5, 0.3, 3, 5), (1.0, 0.7, 0.5, 1.5)])
def test_thermal_coefficients(r, p, b1, b2):
    ab = ab_of(thermal_model(r, p, b1, b2), STRICT)
    assert ab.a_coeff == pytest.approx((1 - p) + p * math.tanh(b1 / 2) * math.tanh(b2 / 2), abs=1e-12)
    assert ab.b_coeff == pytest.approx((1 - p) * math.tanh(2 * r), abs=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 6])
def test_thermal_added_coefficients(k):
    r, p, b1, b2 = 0.4, 0.35, 2.0, 4.0
    ab = ab_of(thermal_model(r, p, b1, b2, k), STRICT)
    expected = (1 - p) + p * math.tanh(b1 / 2) ** (k + 1) * math.tanh(b2 / 2)
    assert ab.a_coeff == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("factory", [
    lambda k: thermal_model(0.5, 0.3, 1.5, 2.5, k),
    lambda k: gaussian_model(0.5, 0.3, 1.2, 2.0, k),
])
@pytest.mark.parametrize("k", [-4, -3, -2, -1, 0, 1, 2, 3, 4])
def test_generic_matches_parity_formulas(factory, k):
    m = factory(k)
    gen, printed = ab_of(m), ab_printed(m)
    assert gen.a_coeff == pytest.approx(printed.a_coeff, abs=1e-10)
    assert gen.b_coeff == pytest.approx(printed.b_coeff, abs=1e-12)


def test_parity_formula_needs_local_noise():
    with pytest.raises(TypeError):
        ab_printed(correlated_model(0.5, 0.2))


def test_chi_forms():
    assert chi_known(ABForm(1.0, 0.0)) == pytest.approx(2.0)
    assert chi_known(ABForm(1.0, 1.0)) == pytest.approx(2 * math.sqrt(2))
    assert chi_unknown(ABForm(1.0, 1.0), 1.0) == pytest.approx(2 * math.sqrt(2))


GRID = [(r, p, b1, b2, k) for r in (0.2, 0.8) for p in (0.1, 0.5, 0.9)
        for b1, b2 in ((0.5, 3.0), (3.0, 5.0)) for k in (-2, 0, 1, 3)]


@pytest.mark.parametrize("r p b1 b2 k".split(), GRID)
def test_unknown_policy_never_beats_known(r, p, b1, b2, k):
    m = thermal_model(r, p, b1, b2, k)
    ab = ab_of(m)
    assert chi_unknown(ab, reference_kernel(m).K) <= chi_known(ab) + 1e-12
    assert kernel(m.pure).sign > 0


def test_threshold_limits():
    s2 = math.sqrt(2)
    assert p_threshold(0.0, 0.7, "known") == pytest.approx(1.0)
    assert p_threshold(0.0, 1.0, "unknown") == pytest.approx(2 - s2)
    assert p_threshold(1.0, 1.0, "known") == pytest.approx(1 - 1 / s2)
    assert p_threshold(1.0, 1.0, "unknown") == pytest.approx(1 - 1 / s2)
    with pytest.raises(ValueError):
        p_threshold(0.5, 0.5, "maybe")


def test_threshold_without_sine_weight():
    # b = 0: the cosine weight 1 - a p alone must exceed one
    assert p_threshold(0.4, 0.0, "known") == pytest.approx(0.0, abs=1e-15)


@given(st.floats(0.1, 2.0), st.floats(0.2, 8.0), st.floats(0.2, 8.0),
       st.sampled_from(["known", "unknown"]), st.sampled_from([0, 1, 2]))
@settings(max_examples=40, deadline=None)
def test_threshold_separates_violation(r, b1, b2, policy, k):
    base = thermal_model(r, 0.0, b1, b2, k, policy)
    a, b = threshold_parameters(base)
    pc = p_threshold(a, b, policy)
    if 1e-3 < pc < 1 - 1e-3:
        below = NoisyStateModel(pc - 1e-4, base.pure, base.noise, policy)
        above = NoisyStateModel(pc + 1e-4, base.pure, base.noise, policy)
        assert chi_model(below) > 2 > chi_model(above)


C_DISTS = [thermal_dist(0.7), uniform_dist(10), point_mass(0), point_mass(4)]


@pytest.mark.parametrize("k", [0, 1, 2, 3])
@pytest.mark.parametrize("policy", ["known", "unknown"])
def test_correlated_noise_independent_of_weights(k, policy):
    vals = [chi_model(correlated_model(0.4, 0.55, c, k, policy)) for c in C_DISTS]
    assert max(vals) - min(vals) < 1e-12


@pytest.mark.parametrize("k", [1, 2, 4])
def test_correlated_addition_formula(k):
    r, p = 0.4, 0.3
    K = kernel(PhotonVariedState.from_r(r, k, 0), STRICT).K
    assert chi_model(correlated_model(r, p, k=k), STRICT) == pytest.approx(
        2 * math.sqrt(1 + ((1 - p) * K) ** 2), abs=1e-12)


@pytest.mark.parametrize("r p".split(), [(0.3, 0.4), (0.8, 0.6)])
def test_correlated_unknown_formula(r, p):
    t = math.tanh(2 * r)
    assert chi_model(correlated_model(r, p, policy="unknown"), STRICT) == pytest.approx(
        2 * (1 + (1 - p) * t * t) / math.sqrt(1 + t * t), abs=1e-12)


def test_correlated_critical_squeezing():
    assert correlated_critical_r(0.5) == 0.0
    assert correlated_critical_r(2 - math.sqrt(2)) == math.inf
    rc = correlated_critical_r(0.55)
    assert rc == pytest.approx(0.436335215715813746, abs=1e-12)
    lo = chi_model(correlated_model(rc - 1e-6, 0.55, policy="unknown"))
    hi = chi_model(correlated_model(rc + 1e-6, 0.55, policy="unknown"))
    assert lo < 2 < hi
    for bad in (0.45, 0.6):
        with pytest.raises(ValueError):
            correlated_critical_r(bad)


@pytest.mark.parametrize("k", [1, 3, 5])
def test_thermal_odd_addition_beats_subtraction(k):
    add = chi_known(ab_of(thermal_model(0.5, 0.4, 1.0, 2.0, k)))
    sub = chi_known(ab_of(thermal_model(0.5, 0.4, 1.0, 2.0, -k)))
    assert add >= sub


@pytest.mark.parametrize("k", [2, 4])
def test_thermal_even_addition_equals_subtraction(k):
    add = chi_known(ab_of(thermal_model(0.5, 0.4, 1.0, 2.0, k)))
    sub = chi_known(ab_of(thermal_model(0.5, 0.4, 1.0, 2.0, -k)))
    assert add == pytest.approx(sub, abs=1e-12)


@pytest.mark.parametrize("model", [
    thermal_model(0.5, 0.2, 3, 5),
    thermal_model(0.5, 0.2, 3, 5, k=3),
    thermal_model(0.4, 0.3, 1.0, 2.0, k=-2),
    gaussian_model(0.4, 0.3, 1.5, 2.0, k=1),
    correlated_model(0.4, 0.6, thermal_dist(1.0), k=2),
    NoisyStateModel(0.25, PhotonVariedState(0.3, 2, 0), CorrelatedNoise(uniform_dist(5))),
])
def test_noisy_models_match_oracle(model):
    rho = materialize(model, 200, auto=False)
    chi = chi_known(ab_of(model))
    assert chi_numeric(rho) == pytest.approx(chi, abs=1e-7)
    assert chi_eigen(rho) == pytest.approx(chi, abs=1e-6)
