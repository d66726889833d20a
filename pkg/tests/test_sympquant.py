import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from irasym.asymptotics import (
    FreeFieldData,
    electric_polarization,
    magnetic_polarization,
    random_free_field,
    transverse_polarization,
)
from irasym.currents import AsymptoteProfile
from irasym.errors import BasisTooSmallError, DivergenceError
from irasym.lorentz import four_velocity
from irasym.sympquant import (
    GaussianCurrent,
    ModeBasis,
    coherent_shift_check,
    fock_product,
    ir_divergence_scan,
    symp_cauchy,
    symp_current,
    symp_null,
    symp_shift_law,
)

seeds = st.integers(0, 2**32 - 1)
W = np.array([0.0, 1.0, 0.5, 0.0])


def _pair():
    a = FreeFieldData(transverse_polarization(np.array([0, 1.0, 0.5, 0])), "hermite", 0, 0.8, 0.1)
    b = FreeFieldData(transverse_polarization(np.array([0, 0.0, 0.5, 1.0])), "hermite", 1, 1.1, -0.3)
    return a, b


def _step():
    E = electric_polarization([four_velocity([0.3, 0, 0]), four_velocity([0, 0.2, 0])], [1, -1])
    return FreeFieldData(E, "step", 0, 1.0)


def test_closed_form_pair():
    # h0 = exp(-s^2/2), h1 = s exp(-s^2/2): int (h0' h1 - h1' h0) = -sqrt(pi);
    # E = w - (w.l) t has E.E = (w.n)^2 - |w|^2, sphere integral -8 pi |w|^2 / 3
    E = transverse_polarization(W)
    V1 = FreeFieldData(E, "hermite", 0)
    V2 = FreeFieldData(E, "hermite", 1)
    expected = 2.0 * np.sqrt(np.pi) / 3.0 * 1.25
    assert abs(symp_null(V1, V2, quad=8) - expected) < 1e-8


def test_antisymmetry():
    a, b = _pair()
    assert abs(symp_null(a, a, quad=8)) < 1e-14
    assert abs(symp_null(a, b, quad=8) + symp_null(b, a, quad=8)) < 1e-12


@settings(max_examples=5, deadline=None)
@given(seeds, st.floats(-2, 2), st.floats(-2, 2))
def test_bilinearity(seed, c1, c2):
    rng = np.random.default_rng(seed)
    a, b, c = (random_free_field(rng) for _ in range(3))
    lhs = symp_null(a.scaled(c1) + b.scaled(c2), c, quad=8, n_s=801)
    rhs = c1 * symp_null(a, c, quad=8, n_s=801) + c2 * symp_null(b, c, quad=8, n_s=801)
    assert abs(lhs - rhs) < 1e-8 * (1 + abs(lhs))


def test_gauge_invariance():
    a, b = _pair()
    alpha = lambda s, l: np.exp(-(s / l[..., 0]) ** 2) * l[..., 1] / l[..., 0]
    shifted = a.profile().gauge_shift(alpha)
    assert abs(symp_null(shifted, b, quad=8) - symp_null(a, b, quad=8)) < 1e-9


def test_singular_profiles_accepted():
    a, _ = _pair()
    assert np.isfinite(symp_null(_step(), a, quad=8))


def test_coulomb_rate_pairing_rejected():
    prof = AsymptoteProfile(lambda s, l: np.zeros(np.shape(l)), 0.0, 0.0)
    with pytest.raises(DivergenceError):
        symp_null(prof, prof, quad=4)


def test_shift_law():
    a, b = _pair()
    p1 = magnetic_polarization(np.array([1, 0.2, 0, 0]), np.array([0, 0, 1.0, 0.3]))
    p2 = transverse_polarization(np.array([0, 0.3, -1.0, 0.2]))
    shifted, predicted, corr = symp_shift_law(a, b, p1, p2, quad=8)
    assert abs(shifted - predicted) < 1e-6
    zero = lambda l: np.zeros(np.shape(l))
    assert symp_shift_law(a, b, zero, zero, quad=8)[2] == 0.0
    # correction flips sign when the roles are swapped
    s1 = symp_shift_law(_step(), b, p1, p2, quad=8)[2]
    s2 = symp_shift_law(b, _step(), p2, p1, quad=8)[2]
    assert abs(s1 + s2) < 1e-12 and abs(s1) > 1e-3


def test_cauchy_of_equal_fields_vanishes():
    J = GaussianCurrent.random(np.random.default_rng(3))
    P = J.profile()
    assert abs(symp_cauchy(P, P, radii=(8.0,), n_r=4)["value"]) < 1e-12


def test_current_of_equal_currents_vanishes():
    J = GaussianCurrent.random(np.random.default_rng(3))
    rep = symp_current(J, J, n_gh=4, quad=6)
    assert abs(rep["current"]) < 1e-12
    assert abs(rep["local"]) < 1e-10


def test_gaussian_current_conserved():
    J = GaussianCurrent.random(np.random.default_rng(4))
    x = np.random.default_rng(5).normal(scale=0.5, size=(5, 4))
    h = 1e-4
    div = 0.0
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        div = div + (J(x + e)[:, a] - J(x - e)[:, a]) / (2 * h)
    assert np.max(np.abs(div)) < 1e-6


def test_fock_commutator_identity():
    a, b = _pair()
    lhs = fock_product(a, b) - fock_product(b, a)
    assert abs(lhs - 1j * symp_null(a, b)) < 1e-6


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_fock_positivity(seed):
    data = random_free_field(np.random.default_rng(seed))
    assert fock_product(data, data, quad=8).real >= 0.0


def test_singular_fock_product_rejected():
    with pytest.raises(DivergenceError):
        fock_product(_step(), _step())


def test_ir_scan_slope():
    scan = ir_divergence_scan(_step())
    assert abs(scan["slope"] - scan["expected_slope"]) < 0.05 * abs(scan["expected_slope"])


def _basis():
    a, b = _pair()
    return ModeBasis.build([a, b], quad=8)


def test_mode_basis_orthonormal():
    assert _basis().gram_residual() < 1e-12


def test_trivial_coherent_shift():
    basis = _basis()
    a, _ = _pair()
    zero = a.scaled(0.0)
    rep = coherent_shift_check(a.scaled(0.5), zero, basis, cutoff=3, quad=8)
    assert rep["residual"] < 1e-12


def test_basis_too_small():
    basis = _basis()
    other = FreeFieldData(transverse_polarization(np.array([0, 0.2, -1.0, 0.7])), "hermite", 2, 0.6)
    with pytest.raises(BasisTooSmallError):
        coherent_shift_check(other, other, basis, cutoff=2, quad=8)
