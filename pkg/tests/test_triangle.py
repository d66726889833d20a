import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_event, random_null
from irasym.asymptotics import (
    FreeFieldData,
    electric_polarization,
    kirchhoff_sampler,
    random_free_field,
    total_asymptotes,
    transverse_polarization,
    zero_field,
)
from irasym.celestial import HomogeneousFn, harmonic_function
from irasym.currents import AsymptoteProfile, PointParticle, ScatteringEvent
from irasym.errors import OutOfDomainError
from irasym.lorentz import four_velocity, lower, mdot, wedge
from irasym.triangle import (
    ChargeSmearing,
    SpacelikeTestFunction,
    TestParticle,
    b_asymptote,
    b_null_limit,
    charge_functional,
    charged_extension,
    finite_R_integrals,
    kick_integral,
    memory_kick,
    memory_phase,
    sigma_phase,
    soft_relation,
    strominger_check,
)

seeds = st.integers(0, 2**32 - 1)
V1 = four_velocity([0.3, 0.1, 0.0])
V2 = four_velocity([-0.2, 0.4, 0.1])


def _coulomb(q, v):
    return lambda l: q * v / mdot(v, l)[..., None]


def _vminus(l):
    return (_coulomb(1.5, V1)(l) + _coulomb(0.5, V2)(l)
            + 0.7 * electric_polarization([V1, V2], [1, -1])(l))


def _memory_field():
    E = electric_polarization([V1, four_velocity([0, 0, -0.3])], [1, -1])
    return (FreeFieldData(E, "step", 0, 1.0, 0.2)
            + FreeFieldData(transverse_polarization(np.array([0, 1.0, 0.5, 0])), "hermite", 1, 0.8))


def test_charged_extension_gauss_law():
    V = charged_extension(_vminus, 2.0)
    l = random_null(np.random.default_rng(0), 20)
    off = l + 0.1 * np.array([1.0, 0.0, 0.2, 0.0])
    assert np.allclose(mdot(off, V(off)), 2.0)
    assert np.allclose(V(3 * off), V(off) / 3)


def test_zero_smearing_gives_zero_charge():
    sm = ChargeSmearing(HomogeneousFn(lambda l: np.zeros(np.shape(l)), -1, (4,)),
                        HomogeneousFn.constant(0.0))
    q1, q2, _ = charge_functional(sm, _vminus, 2.0)
    assert q1 == 0.0 and q2 == 0.0


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_two_charge_forms_agree(seed):
    rng = np.random.default_rng(seed)
    coeffs = {(ell, m): rng.normal() for ell in range(3) for m in range(-ell, ell + 1)}
    sm = ChargeSmearing.from_potential(harmonic_function(coeffs))
    q1, q2, d = charge_functional(sm, _vminus, 2.0)
    assert d < 1e-6


def test_charge_independent_of_gauge():
    sm = ChargeSmearing.from_potential(harmonic_function({(1, 0): 0.7, (2, 1): 0.3, (0, 0): 0.5}))
    shifted = lambda l: _vminus(l) + np.sin(l[..., 1] / l[..., 0])[..., None] * l
    assert abs(charge_functional(sm, _vminus, 2.0)[0] - charge_functional(sm, shifted, 2.0)[0]) < 1e-10


def test_constant_potential_measures_total_charge():
    # eps = 1: d.(q v/(v.l)) = -q/(v.l)^2, so both forms give minus the total charge
    sm = ChargeSmearing.from_potential(HomogeneousFn.constant(1.0))
    q1, q2, _ = charge_functional(sm, _vminus, 2.0)
    assert abs(q1 + 2.0) < 1e-8 and abs(q2 + 2.0) < 1e-8


def test_spacelike_test_function_support():
    f = SpacelikeTestFunction()
    y = np.array([[0.0, 1.5, 0.0, 0.0], [0.6, 1.5, 0.0, 0.0], [0.0, 0.9, 0.0, 0.0]])
    vals = f(y)
    assert vals[0] > 0 and vals[1] == 0 and vals[2] == 0


def test_static_coulomb_b_asymptote():
    # for V = q v/(v.l): W_b = -q l_b/(v.l)^2
    prof = AsymptoteProfile.static(_coulomb(1.3, V1), 1.3)
    l = random_null(np.random.default_rng(1), 8)
    W = b_asymptote(prof)(np.zeros(8), l)
    assert np.allclose(W, -1.3 * lower(l) / mdot(V1, l)[:, None] ** 2, atol=1e-8)


def test_b_asymptote_from_field_samples():
    data = FreeFieldData(transverse_polarization(np.array([0, 1.0, 0.5, -0.3])), "hermite", 1, 0.8, 0.2)
    x = np.array([0.2, -0.3, 0.1, 0.4])
    l = np.array([1.0, 0.0, 0.6, 0.8])
    lim, _ = b_null_limit(kirchhoff_sampler(data), x, l)
    W = b_asymptote(data)(np.float64(mdot(x, l)), l)
    assert np.max(np.abs(lim - W)) < 1e-3


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_strominger_matching(seed):
    rng = np.random.default_rng(seed)
    parts = total_asymptotes(random_event(rng, max_rapidity=0.6), random_free_field(rng, singular=True))
    res = strominger_check(parts["V"], parts["V_past"])
    assert res["divergence_matching"] < 1e-7
    assert res["W_matching"] < 1e-7


def test_zero_memory_phase():
    p = TestParticle(1.0, 1.0, V1)
    assert memory_phase(p, lambda l: np.zeros(np.shape(l))) == 0.0


def test_memory_phase_gauge_shift():
    alpha = harmonic_function({(0, 0): 0.4, (1, 1): 0.3, (2, 0): -0.2})
    shifted = lambda l: _vminus(l) + alpha(l)[..., None] * l
    const = -1.0 / (2 * np.pi) * 0.4 * np.sqrt(4 * np.pi)
    for v in (V1, V2):
        p = TestParticle(1.0, 2.0, v)
        assert abs(memory_phase(p, shifted) - memory_phase(p, _vminus) - const) < 1e-10


def test_lightlike_momentum_rejected():
    p = TestParticle(1.0, 1.0, V1)
    with pytest.raises(OutOfDomainError):
        memory_phase(p, _vminus, p=np.array([1.0, 1.0, 0.0, 0.0]))


def test_sigma_of_constant():
    assert abs(sigma_phase(1.7, V2, lambda l: np.full(np.shape(l)[:-1], 0.6)) - 1.7 * 0.6) < 1e-10


def test_zero_field_no_kick():
    dt, dc, g = memory_kick(TestParticle(1.0, 1.0, V1), zero_field(), quad=8, n_s=201)
    assert np.max(np.abs(np.concatenate([dt, dc, g]))) == 0.0


def test_memory_kick_consistency():
    p = TestParticle(1.3, 2.0, four_velocity([0.1, -0.2, 0.3]))
    dt, dc, g = memory_kick(p, _memory_field(), x0=np.array([0.5, 0.2, -0.1, 0.3]))
    scale = np.max(np.abs(dc))
    assert np.max(np.abs(dt - dc)) < 1e-4 * scale
    assert np.max(np.abs(g - dc)) < 1e-4 * scale


def test_finite_R_integrals():
    k = np.array([1.0, 0.6, 0.0, 0.8])
    rep = finite_R_integrals(_memory_field(), k, tau0=-3.0)
    for v in rep["full_line"].values():
        assert np.max(np.abs(v)) < 1e-8
    assert np.max(np.abs(rep["null"]["limit"] - rep["null"]["expected"])) < 1e-3


def test_kick_integral():
    ev = ScatteringEvent([PointParticle(1.0, four_velocity([0.2, 0, 0]))],
                         [PointParticle(1.0, four_velocity([-0.3, 0.2, 0]))])
    out = total_asymptotes(ev, _memory_field())["out"]
    k = np.array([1.0, 0.6, 0.0, 0.8])
    expected = -wedge(lower(k), lower(out.minus(k)))
    assert np.max(np.abs(kick_integral(out, k) - expected)) < 1e-8


def test_trivial_soft_relation():
    p = PointParticle(1.0, V1)
    rep = soft_relation(ScatteringEvent([p], [p]), zero_field(), quad=4)
    assert rep["residual"] < 1e-14


def test_nontrivial_event_makes_out_field_singular():
    ev = ScatteringEvent([PointParticle(1.0, four_velocity([0.2, 0, 0]))],
                         [PointParticle(1.0, four_velocity([-0.3, 0.2, 0]))])
    regular = FreeFieldData(transverse_polarization(np.array([0, 1.0, 0.5, 0])), "hermite", 1, 0.8)
    rep = soft_relation(ev, regular)
    assert rep["residual"] < 1e-6
    assert rep["in_class"] == "regular" and rep["out_class"] == "singular"
