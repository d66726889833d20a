import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad as scipy_quad
from scipy.special import sph_harm_y

from irasym.errors import InvalidGridError, InvalidOrderError, InvalidSequenceError, InvalidWidthError
from irasym.numerics import (
    FOUR_PI,
    Mollifier,
    SGrid,
    filon_fourier,
    focused_quadrature,
    graded_sphere_quadrature,
    limit_extrapolate,
    power_tail_fourier,
    sphere_quadrature,
    uniform_grid,
)


def test_weights_sum_to_solid_angle():
    for order in (2, 8, 32):
        q = sphere_quadrature(order)
        assert abs(q.weights.sum() - FOUR_PI) < 1e-12
        assert np.all(q.weights > 0)


def test_y20_is_normalized():
    q = sphere_quadrature(16)
    n = q.nodes
    theta = np.arccos(np.clip(n[:, 2], -1, 1))
    y = sph_harm_y(2, 0, theta, np.arctan2(n[:, 1], n[:, 0])).real
    assert abs(q.integrate(y**2) - 1.0) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 9), st.integers(-9, 9))
def test_harmonics_orthogonal_to_constant(ell, m):
    m = max(-ell, min(ell, m))
    if ell == 0:
        return
    q = sphere_quadrature(12)
    n = q.nodes
    theta = np.arccos(np.clip(n[:, 2], -1, 1))
    y = sph_harm_y(ell, m, theta, np.arctan2(n[:, 1], n[:, 0]))
    assert abs(q.integrate(y)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.99, 0.99), st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_graded_rule_integrates_smooth_functions(focus, axis):
    axis = np.asarray(axis) + np.array([0.0, 0.0, 2.0])
    q = graded_sphere_quadrature(8, axis=axis, focus=focus, inner=1e-6)
    assert abs(q.weights.sum() - FOUR_PI) < 1e-10
    assert abs(q.integrate(q.nodes[:, 0] ** 2) - FOUR_PI / 3) < 1e-10


def test_focused_rule_for_origin_is_plain():
    q = focused_quadrature(np.array([1.0, 0, 0, 0]), 6)
    assert len(q) == len(sphere_quadrature(6))


def test_invalid_order():
    for bad in (1, 0, 2.5, -3):
        with pytest.raises(InvalidOrderError):
            sphere_quadrature(bad)


def test_extrapolate_linear():
    h = np.array([0.1, 0.05, 0.025])
    lim, err = limit_extrapolate(h, 1.0 + h)
    assert abs(lim - 1.0) < 1e-14


def test_extrapolate_quadratic():
    h = np.array([0.1, 0.05, 0.025])
    lim, _ = limit_extrapolate(h, 2.0 + 3.0 * h + h**2)
    assert abs(lim - 2.0) < 1e-13


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_extrapolate_reproduces_cubics(c):
    h = 0.3 * 2.0 ** -np.arange(5)
    y = np.polyval(c[::-1], h)
    lim, _ = limit_extrapolate(h, y)
    assert abs(lim - c[0]) < 1e-9 * (1 + np.abs(c).sum())


def test_extrapolate_vector_values():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    y = np.stack([1 + h, -2 + h**2], axis=1)
    lim, _ = limit_extrapolate(h, y)
    assert np.allclose(lim, [1, -2], atol=1e-13)


@pytest.mark.parametrize("h", [[0.1, 0.2, 0.05], [0.1, 0.05], [0.1, -0.05, -0.1]])
def test_extrapolate_invalid_sequence(h):
    with pytest.raises(InvalidSequenceError):
        limit_extrapolate(np.array(h), np.zeros(len(h)))


def test_mollifier_peak():
    assert abs(Mollifier("delta", 0.1)(0.0) - 3.989422804014327) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 2.0))
def test_mollifier_moments(width):
    d = Mollifier("delta", width)
    dp = Mollifier("delta_prime", width)
    x = np.linspace(-12 * width, 12 * width, 4001)
    assert abs(np.trapezoid(d(x), x) - 1.0) < 1e-8
    # int x delta'(x) dx = -1
    assert abs(np.trapezoid(x * dp(x), x) + 1.0) < 1e-8


@pytest.mark.parametrize("width", [0.0, -1.0])
def test_mollifier_invalid_width(width):
    with pytest.raises(InvalidWidthError):
        Mollifier("delta", width)


def test_sgrid_power_tail():
    eps = 0.5
    s = uniform_grid(-40, 40, 4001)
    f = (1 + s**2) ** (-(1 + eps) / 2)
    exact = scipy_quad(lambda x: (1 + x * x) ** (-(1 + eps) / 2), -np.inf, np.inf, limit=400)[0]
    assert abs(SGrid(s, f, eps).integral() - exact) < 2e-3 * exact


def test_sgrid_invalid():
    with pytest.raises(InvalidGridError):
        SGrid(np.array([0.0, 0.0, 1.0]), np.zeros(3))


def test_filon_matches_gaussian_transform():
    s = uniform_grid(-10, 10, 801)
    omega = np.array([0.0, 0.5, 3.0, 40.0])
    got = filon_fourier(s, np.exp(-0.5 * s**2), omega)
    assert np.allclose(got, np.sqrt(2 * np.pi) * np.exp(-0.5 * omega**2), atol=1e-9)


def test_filon_invalid_grid():
    with pytest.raises(InvalidGridError):
        filon_fourier(np.linspace(0, 1, 4), np.zeros(4), np.array([1.0]))


def test_power_tail_fourier_zero_frequency():
    val = power_tail_fourier(1.0, 2.0, 0.5, np.array([0.0]), +1)
    assert abs(val[0] - 2.0 ** -0.5 / 0.5) < 1e-12


def test_power_tail_fourier_quad():
    eps, a, w = 0.5, 3.0, 1.3
    re = scipy_quad(lambda x: x ** (-1 - eps), a, np.inf, weight="cos", wvar=w)[0]
    im = scipy_quad(lambda x: x ** (-1 - eps), a, np.inf, weight="sin", wvar=w)[0]
    got = power_tail_fourier(1.0, a, eps, np.array([w]), +1)[0]
    assert abs(got - (re + 1j * im)) < 1e-8
