import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irasym.asymptotics import electric_polarization, magnetic_polarization, transverse_polarization
from irasym.celestial import (
    HomogeneousFn,
    NullDirection,
    box,
    electric_residual,
    harmonic_function,
    invariant_integral,
    l_derivative,
    potential_decompose,
)
from irasym.errors import ChargedFieldError, DegreeMismatchError
from irasym.lorentz import T_AXIS, boost_matrix, four_velocity, mdot, random_lorentz
from irasym.numerics import FOUR_PI, sphere_quadrature

rapidity = st.floats(-1.0, 1.0)


def test_null_direction_normalized():
    d = NullDirection(np.array([3.0, 0.0, 4.0]))
    assert abs(np.linalg.norm(d.n) - 1) < 1e-14
    assert mdot(d.l, d.l) == 0.0


def test_homogeneity_by_construction():
    f = harmonic_function({(2, 1): 1.0, (1, 0): 0.3}, -2)
    l = NullDirection(np.array([0.1, 0.5, 0.8])).l
    assert abs(f(3.0 * l) - 3.0**-2 * f(l)) < 1e-14


def test_unit_integrand():
    f = HomogeneousFn(lambda l: 1.0 / l[..., 0] ** 2, -2)
    assert abs(invariant_integral(f, sphere_quadrature(8)) - FOUR_PI) < 1e-12


def test_boosted_coulomb_integrand():
    # 1/(v.l)^2 integrates to 4 pi in any frame (rapidity 1 along z)
    v = np.array([np.cosh(1.0), 0, 0, np.sinh(1.0)])
    f = HomogeneousFn(lambda l: 1.0 / mdot(v, l) ** 2, -2)
    assert abs(invariant_integral(f, sphere_quadrature(32)) - FOUR_PI) < 1e-8


def test_wrong_degree():
    with pytest.raises(DegreeMismatchError):
        invariant_integral(HomogeneousFn.constant(1.0), sphere_quadrature(4))


def test_degree_mismatch_on_sum():
    with pytest.raises(DegreeMismatchError):
        HomogeneousFn.constant(1.0) + harmonic_function({(0, 0): 1.0}, -2)


def test_l_derivative_integrates_to_zero():
    g = harmonic_function({(1, 1): 0.7, (3, -2): 0.4}, -2)
    q = sphere_quadrature(24)
    for a, b in ((0, 1), (0, 3), (1, 2), (2, 3)):
        assert abs(invariant_integral(l_derivative(g, a, b), q)) < 1e-8


def test_l03_of_time_component():
    f = HomogeneousFn(lambda l: mdot(T_AXIS, l), 1)
    l = NullDirection(np.array([0.0, 0.0, 1.0])).l
    # covariant components: l_0 t_3 - l_3 t_0 with l_3 = -1
    assert abs(l_derivative(f, 0, 3)(l) - 1.0) < 1e-10
    assert abs(l_derivative(f, 0, 3, upper=True)(l) + 1.0) < 1e-10


def test_l_derivative_of_constant():
    l = NullDirection(np.array([0.3, -0.2, 0.9])).l
    for a, b in ((0, 1), (1, 3)):
        assert abs(l_derivative(HomogeneousFn.constant(2.5), a, b)(l)) < 1e-12


def test_index_range():
    with pytest.raises(IndexError):
        l_derivative(HomogeneousFn.constant(1.0), 0, 4)


def test_box_symmetric_pairing():
    phi = harmonic_function({(1, 0): 0.5, (2, 2): -0.3, (3, 1): 0.2}, 0)
    psi = harmonic_function({(1, 1): 0.4, (2, 2): 0.6, (3, 1): -0.1}, 0)
    q = sphere_quadrature(16)
    l = q.null_directions()
    lhs = q.integrate(phi(l) * box(psi, l))
    rhs = q.integrate(psi(l) * box(phi, l))
    assert abs(lhs - rhs) < 1e-7


def test_box_on_harmonic_eigenvalue():
    f = harmonic_function({(3, 1): 1.0}, 0)
    l = sphere_quadrature(6).null_directions()
    assert np.allclose(box(f, l), 12.0 * f(l), atol=1e-6)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_invariant_integral_frame_independent(seed):
    rng = np.random.default_rng(seed)
    f = harmonic_function({(1, 0): rng.normal(), (2, -1): rng.normal(), (0, 0): 1.0}, -2)
    q = sphere_quadrature(32)
    a = invariant_integral(f, q, random_lorentz(rng, 0.8))
    b = invariant_integral(f, q, random_lorentz(rng, 0.8))
    assert abs(a - b) < 1e-7


def test_zero_field_potentials():
    pot = potential_decompose(lambda l: np.zeros(np.shape(l)), order=8)
    l = sphere_quadrature(4).null_directions()
    assert np.max(np.abs(pot.phi(l))) < 1e-14
    assert np.max(np.abs(pot.psi(l))) < 1e-14


def test_charged_input_rejected():
    v = four_velocity([0.2, 0.0, 0.1])
    with pytest.raises(ChargedFieldError):
        potential_decompose(lambda l: v / mdot(v, l)[..., None])


def _electric():
    return electric_polarization([four_velocity([0.3, 0.1, 0.0]), four_velocity([-0.1, 0.0, 0.4])],
                                 [1.0, -1.0])


def test_electric_field_has_constant_psi():
    V = _electric()
    l = sphere_quadrature(6).null_directions()
    assert electric_residual(V, l) < 1e-8
    pot = potential_decompose(V, order=24)
    psi = pot.psi(l)
    assert np.max(np.abs(psi - psi.mean())) < 1e-6


def test_reconstruction_residual_small():
    V = lambda l: _electric()(l) + transverse_polarization(np.array([0.0, 1.0, 0.5, -0.2]))(l)
    pot = potential_decompose(V, order=24, with_residual=True)
    assert pot.residual < 1e-5


def test_special_solution_identity():
    E = _electric()
    M = magnetic_polarization(np.array([1.0, 0.2, 0.0, 0.0]), np.array([0.0, 0.0, 1.0, 0.3]))
    V = lambda l: E(l) + M(l)
    pot = potential_decompose(V, order=24)
    q = sphere_quadrature(12)
    l = q.null_directions()
    lhs = q.integrate(pot.phi(l) / l[:, 0] ** 2)
    rhs = q.integrate(V(l)[:, 0] / l[:, 0])
    assert abs(lhs - rhs) < 1e-6


def test_boost_matrix_maps_time_axis():
    v = four_velocity([0.3, -0.4, 0.2])
    assert np.allclose(boost_matrix(v) @ T_AXIS, v, atol=1e-14)
