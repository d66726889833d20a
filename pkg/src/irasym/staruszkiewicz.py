"""The degree-0 phase field at spacelike infinity, its Weyl group and Casimir values."""
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .celestial import (
    HomogeneousFn,
    box,
    harmonic_box,
    harmonic_function,
    real_sph_harm,
)
from .errors import (
    InconsistentChargeError,
    InvalidCouplingError,
    OutOfDomainError,
    QuantizationError,
)
from .lorentz import T_AXIS, boost_matrix, lower, mdot, msquare, wedge
from .numerics import (
    FOUR_PI,
    focused_quadrature,
    limit_extrapolate,
    resolve_quadrature,
    sphere_quadrature,
)

QUANT_TOL = 1e-8


@dataclass(frozen=True)
class StarData:
    """Pair (D, c) of degrees (0, -2) with elementary charge e.

    ``box_D`` is d^2 D when known analytically; otherwise it is computed by
    finite differences.  ``quantized`` enforces Q(c) in eZ.
    """

    D: HomogeneousFn
    c: HomogeneousFn
    e: float = 1.0
    box_D: Optional[HomogeneousFn] = None
    quantized: bool = True

    def __post_init__(self):
        if self.D.degree != 0 or self.c.degree != -2:
            raise ValueError("StarData needs D of degree 0 and c of degree -2")
        if self.quantized:
            check_quantized(self.charge(), self.e)

    @classmethod
    def from_harmonics(cls, D_coeffs, c_coeffs, e=1.0, frame=None, quantized=True):
        """D = sum d_lm Y_lm, c = (u.l)^-2 sum c_lm Y_lm on the rest sphere of ``frame``."""
        D_coeffs = _coeff_dict(D_coeffs)
        c_coeffs = _coeff_dict(c_coeffs)
        return cls(harmonic_function(D_coeffs, 0, frame), harmonic_function(c_coeffs, -2, frame),
                   e, harmonic_box(D_coeffs, frame), quantized)

    def charge(self, quad=24):
        """Q(c) = 1/4pi int c d^2l."""
        q = resolve_quadrature(quad)
        return float(q.integrate(self.c(q.null_directions())) / FOUR_PI)

    def boxed_D(self, l):
        if self.box_D is not None:
            return self.box_D(l)
        return box(self.D, l)

    def __add__(self, other):
        bd = None
        if self.box_D is not None and other.box_D is not None:
            bd = self.box_D + other.box_D
        return StarData(self.D + other.D, self.c + other.c, self.e, bd, self.quantized)

    def __neg__(self):
        bd = None if self.box_D is None else -self.box_D
        return StarData(-self.D, -self.c, self.e, bd, self.quantized)


def _coeff_dict(coeffs):
    """Accept {(l, m): v} or a list of (l, m, v) triples."""
    if isinstance(coeffs, dict):
        return {(int(k[0]), int(k[1])): float(v) for k, v in coeffs.items()}
    out = {}
    for ell, m, v in coeffs:
        key = (int(ell), int(m))
        out[key] = out.get(key, 0.0) + float(v)
    return out


def check_quantized(Q, e, tol=QUANT_TOL):
    n = Q / e
    if abs(n - round(n)) > tol:
        raise QuantizationError(f"charge Q = {Q!r} is not an integer multiple of e = {e!r}")
    return int(round(n))


def coulomb_star_data(Q, v, e=1.0):
    """D = 0, c = Q/(v.l)^2."""
    v = np.asarray(v, dtype=float)
    zero = HomogeneousFn(lambda l: np.zeros(np.shape(l)[:-1]), 0)
    c = HomogeneousFn(lambda l: Q / mdot(v, l) ** 2, -2)
    zero_box = HomogeneousFn(lambda l: np.zeros(np.shape(l)[:-1]), -2)
    return StarData(zero, c, e, zero_box, quantized=False)


def _check_off_cone(x):
    x = np.asarray(x, dtype=float)
    x2 = msquare(x)
    scale = float(x @ x)
    if abs(x2) <= 1e-12 * scale:
        raise OutOfDomainError("x lies on the light cone")
    if abs(x2) <= 1e-6 * scale:
        warnings.warn("x is close to the light cone; quadrature may be inaccurate", RuntimeWarning)
    return x, x2


def _rule_for(x, order):
    return focused_quadrature(x, order) if msquare(x) < 0 else sphere_quadrature(order)


def s_field(data, v, x, order=48):
    """S(x) = -e/4pi int [c sgn(x.l) + d^2D log(|x.l|/(v.l))] d^2l + e/4pi int D/(v.l)^2 d^2l.

    For spacelike x the sphere rule is graded towards the circle x.l = 0, where
    the sign jumps and the logarithm is singular.
    """
    x, _ = _check_off_cone(x)
    v = np.asarray(v, dtype=float)
    q = _rule_for(x, order)
    l = q.null_directions()
    u = mdot(l, x)
    vl = mdot(l, v)
    kernel = data.c(l) * np.sign(u) + data.boxed_D(l) * np.log(np.abs(u) / vl)
    sv = q.integrate(data.D(l) / vl**2)
    return float(data.e / FOUR_PI * (sv - q.integrate(kernel)))


def s_potential(data, v, x, order=48):
    """A_a = -x_a S/(e x^2), covariant."""
    x, x2 = _check_off_cone(x)
    return -lower(x) * s_field(data, v, x, order) / (data.e * x2)


def star_field_strength(data, x, order=48, etas=None):
    """F_ab(x) for x^2 < 0 from the kernel 1/(x.l - i eta), extrapolated to eta = 0.

    F = 1/(8 pi x^2) int (l_a x_b - l_b x_a)/(x.l - i0) [d^2D - (2i/pi) c] d^2l + c.c.
    """
    x, x2 = _check_off_cone(x)
    if x2 >= 0:
        raise OutOfDomainError("the field strength is defined for spacelike x")
    r = float(np.linalg.norm(x[1:]))
    if etas is None:
        etas = 0.02 * r * 2.0 ** -np.arange(6)
    q = focused_quadrature(x, order)
    l = q.null_directions()
    u = mdot(l, x)
    K = data.boxed_D(l) - 2j / np.pi * data.c(l)
    lx = wedge(lower(l), np.broadcast_to(lower(x), l.shape))
    Fs = []
    for eta in etas:
        val = q.integrate((K / (u - 1j * eta))[:, None, None] * lx)
        Fs.append(2.0 * val.real / (8.0 * np.pi * x2))
    F, _ = limit_extrapolate(np.asarray(etas), np.array(Fs))
    return F


def potential_curl(data, v, x, h=1e-3, order=48):
    """d_a A_b - d_b A_a of A = -x S/(e x^2) by fourth-order differences."""
    x = np.asarray(x, dtype=float)
    dA = np.zeros((4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        vals = [s_potential(data, v, x + k * e, order) for k in (-2, -1, 1, 2)]
        dA[a] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return dA - dA.T


def maxwell_residual(data, x, h=1e-3, order=48):
    """max |d^a F_ab| and max |d_[a F_bc]| by fourth-order differences of the field strength."""
    x = np.asarray(x, dtype=float)
    dF = np.zeros((4, 4, 4))  # dF[a] = d_a F
    for a in range(4):
        e = np.zeros(4)
        e[a] = h
        vals = [star_field_strength(data, x + k * e, order) for k in (-2, -1, 1, 2)]
        dF[a] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    eta = np.diag([1.0, -1.0, -1.0, -1.0])
    div = np.einsum("ac,cab->b", eta, dF)
    bianchi = dF + np.transpose(dF, (1, 2, 0)) + np.transpose(dF, (2, 0, 1))
    return float(np.max(np.abs(div))), float(np.max(np.abs(bianchi)))


# --------------------------------------------------------------------------
# charge decomposition


@dataclass(frozen=True)
class ChargeDecomposition:
    Q: float
    F_v: HomogeneousFn
    coeffs: dict
    residual: float


def charge_decompose(c, v, lmax=24, order=48, check=None, tol=1e-8):
    """c = Q/(v.l)^2 + d^2 F_v with F_v spanned by harmonics 1 <= l <= lmax of the v frame."""
    v = np.asarray(v, dtype=float)
    lam = boost_matrix(v)
    q = sphere_quadrature(order).in_frame(lam)
    l = q.null_directions()  # v.l = 1 on these nodes
    Q = float(q.integrate(c(l)) / FOUR_PI)
    g = c(l) - Q
    n = q.nodes
    g00 = float(q.weights @ (g * real_sph_harm(0, 0, n)))
    if abs(g00) > tol:
        raise InconsistentChargeError(f"l = 0 component {g00:.3e} remains after removing the charge")
    coeffs = {}
    for ell in range(1, lmax + 1):
        for m in range(-ell, ell + 1):
            coeffs[(ell, m)] = float(q.weights @ (g * real_sph_harm(ell, m, n))) / (ell * (ell + 1))
    F_v = harmonic_function(coeffs, 0, lam)
    rebuilt = _rebuild(Q, coeffs, v, lam)
    cq = check if check is not None else sphere_quadrature(20)
    lc = cq.null_directions()
    residual = float(np.max(np.abs(rebuilt(lc) - c(lc))))
    return ChargeDecomposition(Q, F_v, coeffs, residual)


def _rebuild(Q, coeffs, v, lam):
    boxed = harmonic_box(coeffs, lam)
    return HomogeneousFn(lambda l: Q / mdot(v, l) ** 2 + boxed(l), -2)


# --------------------------------------------------------------------------
# pairing, Weyl group, Casimir


def star_pairing(D, c, quad=24):
    """<D, c> = 1/4pi int D c d^2l (the factor i of the commutator is kept outside)."""
    q = resolve_quadrature(quad)
    l = q.null_directions()
    return float(q.integrate(D(l) * c(l)) / FOUR_PI)


def star_sigma(a, b, quad=24):
    """sigma(a; b) = <D_a, c_b> - <D_b, c_a>."""
    return star_pairing(a.D, b.c, quad) - star_pairing(b.D, a.c, quad)


def _wrap(phase):
    return float(np.angle(np.exp(1j * phase)))


@dataclass(frozen=True)
class StarWeylElement:
    data: StarData
    phase: float = 0.0

    @classmethod
    def identity(cls, e=1.0):
        zero0 = HomogeneousFn(lambda l: np.zeros(np.shape(l)[:-1]), 0)
        zero2 = HomogeneousFn(lambda l: np.zeros(np.shape(l)[:-1]), -2)
        return cls(StarData(zero0, zero2, e, zero2), 0.0)

    def inverse(self):
        return StarWeylElement(-self.data, -self.phase)


def weyl_compose(w1, w2, quad=24):
    """W1 W2 = exp(i sigma(1; 2)/2) W(D1 + D2, c1 + c2), phases added mod 2 pi."""
    for w in (w1, w2):
        check_quantized(w.data.charge(quad), w.data.e)
    sig = star_sigma(w1.data, w2.data, quad)
    return StarWeylElement(w1.data + w2.data, _wrap(w1.phase + w2.phase + 0.5 * sig))


def phase_difference(a, b):
    return abs(_wrap(a - b))


def casimir(z):
    """(z(2 - z), 1 - sqrt z, regime) for the supplementary-series component at coupling z.

    z = 1 is the boundary case with value 1 and nu = 0; z > 1 has no discrete part.
    """
    z = float(z)
    if not z > 0:
        raise InvalidCouplingError(f"coupling z must be positive, got {z!r}")
    if z < 1.0:
        return z * (2.0 - z), 1.0 - np.sqrt(z), "discrete-supplementary"
    if z == 1.0:
        return 1.0, 0.0, "boundary"
    return None, None, "continuous-only"
