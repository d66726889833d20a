import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irasym.asymptotics import spacelike_tail_exact
from irasym.celestial import harmonic_box
from irasym.errors import InvalidCouplingError, OutOfDomainError, QuantizationError
from irasym.lorentz import four_velocity, mdot
from irasym.staruszkiewicz import (
    StarData,
    StarWeylElement,
    casimir,
    charge_decompose,
    coulomb_star_data,
    maxwell_residual,
    phase_difference,
    potential_curl,
    s_field,
    star_field_strength,
    star_pairing,
    star_sigma,
    weyl_compose,
)

Y00 = np.sqrt(4 * np.pi)
X = np.array([0.3, 1.0, -0.5, 0.7])
V1 = four_velocity([0.2, -0.1, 0.3])
V2 = four_velocity([-0.4, 0.2, 0.0])


def _data():
    return StarData.from_harmonics([(1, 0, 0.4), (2, 1, -0.3), (3, -2, 0.2), (0, 0, 0.5)],
                                   [(0, 0, 2 * Y00), (1, 1, 0.3), (2, 0, -0.2)])


def test_charge_of_harmonic_data():
    assert abs(_data().charge() - 2.0) < 1e-12


def test_quantization_enforced():
    with pytest.raises(QuantizationError):
        StarData.from_harmonics([], [(0, 0, 0.5 * Y00)])
    StarData.from_harmonics([], [(0, 0, 0.5 * Y00)], e=0.5)


@pytest.mark.parametrize("x", [X, np.array([2.0, 0.3, 0.1, -0.4]), np.array([-1.5, 0.3, 0.5, 0.2])])
def test_s_homogeneous_and_frame_free(x):
    d = _data()
    s = s_field(d, V1, x)
    assert abs(s_field(d, V1, 2 * x) - s) < 1e-6
    assert abs(s_field(d, V2, x) - s) < 1e-6


def test_s_piecewise_constant_in_time_cones():
    # timelike x: sgn(x.l) = sgn(x0) on the whole sphere, so S = -e Q sgn(x0)
    d = StarData.from_harmonics([], [(0, 0, 3 * Y00)])
    for t, sign in ((1.0, 1), (2.0, 1), (-1.0, -1), (-3.0, -1)):
        assert abs(s_field(d, V1, np.array([t, 0.1, 0.2, 0.3])) + 3.0 * sign) < 1e-10


def test_light_cone_rejected_and_near_warned():
    d = _data()
    with pytest.raises(OutOfDomainError):
        s_field(d, V1, np.array([1.0, 1.0, 0.0, 0.0]))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        s_field(d, V1, np.array([1.0 + 1e-8, 1.0, 0.0, 0.0]), order=8)
    assert any(issubclass(w.category, RuntimeWarning) for w in rec)


def test_field_strength_homogeneity():
    d = _data()
    F = star_field_strength(d, X)
    assert np.max(np.abs(star_field_strength(d, 2 * X) - F / 4)) < 1e-5 * np.max(np.abs(F))


def test_field_strength_is_curl_of_potential():
    d = _data()
    assert np.max(np.abs(potential_curl(d, V1, X) - star_field_strength(d, X))) < 1e-6


def test_field_strength_timelike_rejected():
    with pytest.raises(OutOfDomainError):
        star_field_strength(_data(), np.array([2.0, 0.1, 0.0, 0.0]))


def test_maxwell_equations():
    div, bianchi = maxwell_residual(_data(), X)
    assert div < 1e-4 and bianchi < 1e-4


def test_d_part_even():
    d = StarData.from_harmonics([(1, 0, 0.4), (2, 1, -0.3)], [])
    assert np.max(np.abs(star_field_strength(d, -X) - star_field_strength(d, X))) < 1e-8


def test_coulomb_data_reproduces_boosted_tail():
    cd = coulomb_star_data(2.0, V1)
    _, F = spacelike_tail_exact(lambda l: 2.0 * V1 / mdot(V1, l)[..., None], X)
    assert np.max(np.abs(star_field_strength(cd, X) - F)) < 1e-8 * max(1.0, np.max(np.abs(F)))


def test_decompose_coulomb():
    dec = charge_decompose(coulomb_star_data(1.0, V2).c, V2)
    assert abs(dec.Q - 1.0) < 1e-12
    assert max(abs(v) for v in dec.coeffs.values()) < 1e-10


def test_decompose_pure_box_has_no_charge():
    c = harmonic_box({(1, 1): 0.3, (2, -1): 0.5, (4, 0): 0.1})
    dec = charge_decompose(c, V1)
    assert abs(dec.Q) < 1e-10
    assert dec.residual < 1e-6


@settings(max_examples=3, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decompose_round_trip_and_frame_invariance(seed):
    rng = np.random.default_rng(seed)
    c = _data().c
    v = four_velocity(rng.uniform(-0.4, 0.4, 3))
    dec = charge_decompose(c, v)
    assert dec.residual < 1e-6
    assert abs(dec.Q - 2.0) < 1e-8


def test_inverse_is_identity():
    w = StarWeylElement(_data(), 0.3)
    prod = weyl_compose(w, w.inverse())
    assert abs(prod.phase) < 1e-14
    assert abs(prod.data.charge()) < 1e-12


def _random_star(rng):
    n = int(rng.integers(-2, 3))
    D = [(ell, m, rng.normal()) for ell in range(3) for m in range(-ell, ell + 1)]
    c = [(0, 0, n * Y00)] + [(ell, m, rng.normal()) for ell in range(1, 3) for m in range(-ell, ell + 1)]
    return StarData.from_harmonics(D, c)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weyl_associativity(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (StarWeylElement(_random_star(rng)) for _ in range(3))
    left = weyl_compose(weyl_compose(a, b), c)
    right = weyl_compose(a, weyl_compose(b, c))
    assert phase_difference(left.phase, right.phase) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sigma_antisymmetric_and_charges_add(seed):
    rng = np.random.default_rng(seed)
    a, b = _random_star(rng), _random_star(rng)
    assert abs(star_sigma(a, b) + star_sigma(b, a)) < 1e-12
    assert abs((a + b).charge() - a.charge() - b.charge()) < 1e-12
    assert abs(star_pairing(a.D, 2.0 * b.c) - 2.0 * star_pairing(a.D, b.c)) < 1e-12


def test_casimir_values():
    assert casimir(0.25) == (7 / 16, 0.5, "discrete-supplementary")
    assert casimir(1.0) == (1.0, 0.0, "boundary")
    assert casimir(2.0) == (None, None, "continuous-only")
    for bad in (0.0, -1.0):
        with pytest.raises(InvalidCouplingError):
            casimir(bad)
