"""Calculus on the future light cone C+.

Functions on the cone are represented by their homogeneous extensions to a
neighbourhood of the cone in the ambient Minkowski space; derivatives are
taken in the ambient space and restricted back.  ``L_ab = l_a d_b - l_b d_a``
is intrinsic, so the choice of extension never matters for it.
"""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import sph_harm_y

from .errors import ChargedFieldError, DegreeMismatchError
from .lorentz import ETA, dual, lower, mdot, null_vectors, rotation_to, wedge
from .numerics import FOUR_PI, _gauss_legendre, sphere_quadrature

FD_STEP = 1e-4


@dataclass(frozen=True)
class NullDirection:
    """Point of C+ scaled to t.l = 1, i.e. l = (1, n) with |n| = 1."""

    n: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float)
        norm = np.linalg.norm(n)
        if abs(norm - 1.0) > 1e-14:
            n = n / norm
        object.__setattr__(self, "n", n)

    @property
    def l(self):
        return null_vectors(self.n)

    @classmethod
    def from_vector(cls, l):
        l = np.asarray(l, dtype=float)
        return cls(l[1:] / l[0])


@dataclass(frozen=True)
class HomogeneousFn:
    """Function on a neighbourhood of C+ with f(lam l) = lam^degree f(l).

    ``func`` maps ambient vectors of shape (..., 4) to values of shape
    (...,) + value_shape.  The caller guarantees homogeneity; constructors
    below build it in.
    """

    func: Callable
    degree: int
    value_shape: tuple = ()
    grad: Optional[Callable] = None

    def __call__(self, l):
        return self.func(np.asarray(l, dtype=float))

    def _combine(self, other, op):
        if isinstance(other, HomogeneousFn):
            if other.degree != self.degree:
                raise DegreeMismatchError(
                    f"cannot combine degrees {self.degree} and {other.degree}")
            f, g = self.func, other.func
            return HomogeneousFn(lambda l: op(f(l), g(l)), self.degree, self.value_shape)
        return NotImplemented

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        f = self.func
        return HomogeneousFn(lambda l: -f(l), self.degree, self.value_shape)

    def __mul__(self, scalar):
        f = self.func
        scalar = float(scalar)
        return HomogeneousFn(lambda l: scalar * f(l), self.degree, self.value_shape)

    __rmul__ = __mul__

    @classmethod
    def from_sphere(cls, g, degree, frame=None, value_shape=()):
        """Extend g(n) on the unit sphere of a rest frame homogeneously.

        f(l) = (u.l)^degree g(direction of l in the frame), with u the frame's
        time axis.  ``frame`` is a Lorentz matrix mapping t to u (default identity).
        """
        inv = None if frame is None else np.linalg.inv(frame)

        def func(l):
            lr = l if inv is None else l @ inv.T
            spatial = lr[..., 1:]
            n = spatial / np.linalg.norm(spatial, axis=-1, keepdims=True)
            scale = lr[..., 0] ** degree
            val = g(n)
            return val * scale.reshape(scale.shape + (1,) * len(value_shape))

        return cls(func, degree, value_shape)

    @classmethod
    def constant(cls, value=1.0):
        value = float(value)
        return cls(lambda l: np.full(np.shape(l)[:-1], value), 0)


def invariant_integral(f, quad, frame=None):
    """Integral of a degree -2 function over the cone, evaluated on the sphere of ``quad``.

    ``frame`` (a Lorentz matrix) selects the time axis used for the scaling; the
    result is frame independent up to quadrature error.
    """
    if getattr(f, "degree", -2) != -2:
        raise DegreeMismatchError(f"invariant integral needs degree -2, got {f.degree}")
    q = quad if frame is None else quad.in_frame(frame)
    return q.integrate(f(q.null_directions()))


def gradient(f, l, step=FD_STEP):
    """Ambient gradient d f / d l^b (covariant index last).

    Fourth-order central differences on the homogeneous extension unless the
    function carries an analytic gradient.
    """
    l = np.asarray(l, dtype=float)
    if getattr(f, "grad", None) is not None:
        return f.grad(l)
    cols = []
    for b in range(4):
        e = np.zeros(4)
        e[b] = step
        d = (-f(l + 2 * e) + 8 * f(l + e) - 8 * f(l - e) + f(l - 2 * e)) / (12 * step)
        cols.append(d)
    return np.stack(cols, axis=-1)


def l_tensor(f, l, step=FD_STEP):
    """L_ab f at the points l, all indices covariant; shape (...,) + value_shape + (4, 4)."""
    l = np.asarray(l, dtype=float)
    g = gradient(f, l, step)
    ll = lower(l)
    extra = g.ndim - l.ndim
    ll = ll.reshape(l.shape[:-1] + (1,) * extra + (4,))
    return ll[..., :, None] * g[..., None, :] - ll[..., None, :] * g[..., :, None]


def l_derivative(f, a, b, upper=False, step=FD_STEP):
    """The homogeneous function L_ab f (same degree as f).

    Components are covariant; ``upper=True`` returns L^ab f instead.
    """
    if not (0 <= a < 4 and 0 <= b < 4):
        raise IndexError("tensor indices run over 0..3")
    sign = ETA[a, a] * ETA[b, b] if upper else 1.0

    def func(l):
        return sign * l_tensor(f, l, step)[..., a, b]

    return HomogeneousFn(func, f.degree, f.value_shape)


def divergence(V, l, step=FD_STEP):
    """d_a V^a of a (contravariant) vector field at ambient points l."""
    g = gradient(V, l, step)  # (..., comp, deriv)
    return np.einsum("...aa->...", g)


def box(f, l, step=1e-3):
    """d^a d_a f at ambient points l (fourth-order second differences)."""
    l = np.asarray(l, dtype=float)
    f0 = f(l)
    total = 0.0
    for b in range(4):
        e = np.zeros(4)
        e[b] = step
        d2 = (-f(l + 2 * e) + 16 * f(l + e) - 30 * f0 + 16 * f(l - e) - f(l - 2 * e)) / (
            12 * step**2)
        total = total + ETA[b, b] * d2
    return total


def real_sph_harm(ell, m, n):
    """Orthonormal real spherical harmonic Y_lm at unit vectors n (..., 3)."""
    n = np.asarray(n, dtype=float)
    theta = np.arccos(np.clip(n[..., 2], -1.0, 1.0))
    phi = np.arctan2(n[..., 1], n[..., 0])
    y = sph_harm_y(ell, abs(m), theta, phi)
    if m == 0:
        return y.real
    if m > 0:
        return np.sqrt(2.0) * (-1) ** m * y.real
    return np.sqrt(2.0) * (-1) ** m * y.imag


def harmonic_sum(coeffs, n):
    """sum c_lm Y_lm(n) for a mapping {(l, m): c}."""
    n = np.asarray(n, dtype=float)
    out = np.zeros(n.shape[:-1])
    for (ell, m), c in coeffs.items():
        out = out + c * real_sph_harm(ell, m, n)
    return out


def harmonic_function(coeffs, degree=0, frame=None):
    """Homogeneous extension of sum c_lm Y_lm from the rest sphere of ``frame``."""
    coeffs = {(int(k[0]), int(k[1])): float(v) for k, v in dict(coeffs).items()}
    for ell, m in coeffs:
        if ell < 0 or abs(m) > ell:
            raise ValueError(f"invalid harmonic index (l={ell}, m={m})")
    return HomogeneousFn.from_sphere(lambda n: harmonic_sum(coeffs, n), degree, frame)


def harmonic_box(coeffs, frame=None):
    """d^2 of the degree-0 extension of sum c_lm Y_lm, as a degree -2 function.

    On the cone d^2 acts on degree-0 functions as minus the Laplacian of the
    rest sphere, scaled by (u.l)^-2.
    """
    boxed = {k: k[0] * (k[0] + 1) * v for k, v in dict(coeffs).items()}
    return harmonic_function(boxed, -2, frame)


def electric_residual(V, l, step=FD_STEP):
    """sup |L_[ab V_c]| at the points l; vanishes for fields without magnetic part."""
    LV = l_tensor(lambda x: lower(V(x)), l, step)  # (..., c, a, b)
    total = LV + np.moveaxis(LV, (-3, -2, -1), (-1, -3, -2)) + np.moveaxis(
        LV, (-3, -2, -1), (-2, -1, -3))
    return float(np.max(np.abs(total)))


def _polar_singular_rule(order):
    """Rule on the sphere around the north pole with radial variable sin(theta/2).

    cos(theta) = 1 - 2 sigma^2 maps the 1/theta singularity of the 1/(l.l')
    kernels at the pole into a smooth integrand.
    """
    x, w = _gauss_legendre(order)
    sigma = 0.5 * (x + 1.0)
    w_sigma = 0.5 * w * 4.0 * sigma
    mu = 1.0 - 2.0 * sigma**2
    n_phi = 2 * order
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(np.clip(1.0 - mu**2, 0.0, None))
    nodes = np.stack(
        [np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)), np.outer(mu, np.ones(n_phi))],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.outer(w_sigma, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    return nodes, weights


def _kernel_potentials(V, targets, order, chunk=64):
    """phi and psi at unit vectors ``targets`` (P, 3) by the 1/(l.l') kernels.

    phi(l) = 1/4pi int l.V(l') / (l.l') d^2l'   (special solution)
    psi(l) = 1/4pi int V_vec(l').(n x n') / (1 - n.n') d^2l'
    """
    base, w = _polar_singular_rule(order)
    targets = np.atleast_2d(targets)
    phi = np.empty(len(targets))
    psi = np.empty(len(targets))
    for start in range(0, len(targets), chunk):
        tg = targets[start:start + chunk]
        rots = np.stack([rotation_to(n) for n in tg])  # (P, 3, 3)
        nodes = np.einsum("pij,mj->pmi", rots, base)  # (P, M, 3)
        lp = null_vectors(nodes)
        Vp = V(lp)  # (P, M, 4)
        lt = null_vectors(tg)[:, None, :]
        denom = 1.0 - np.einsum("pi,pmi->pm", tg, nodes)
        num_phi = mdot(lt, Vp)
        cross = np.cross(tg[:, None, :], nodes)
        num_psi = np.einsum("pmi,pmi->pm", Vp[..., 1:], cross)
        phi[start:start + chunk] = (num_phi / denom) @ w / FOUR_PI
        psi[start:start + chunk] = (num_psi / denom) @ w / FOUR_PI
    return phi, psi


@dataclass(frozen=True)
class PotentialPair:
    """Scalar potentials with l^V = L phi - *L psi (phi special, psi zero-mean)."""

    phi: HomogeneousFn
    psi: HomogeneousFn
    residual: Optional[float] = None

    def __iter__(self):
        return iter((self.phi, self.psi))


def reconstruction_residual(V, phi, psi, quad, step=FD_STEP):
    """sup over nodes of |l^V - L phi + *L psi| (covariant components)."""
    l = quad.null_directions()
    lv = wedge(lower(l), lower(V(l)))
    Lphi = l_tensor(phi, l, step)
    Lpsi = l_tensor(psi, l, step)
    return float(np.max(np.abs(lv - Lphi + dual(Lpsi))))


def potential_decompose(Vplus, order=24, check_quad=None, charge_tol=1e-10,
                        with_residual=False):
    """Scalar potentials of a charge-free tangent field V (l.V = 0, degree -1).

    phi is the special solution given by the 1/(l.l') kernel (its additive
    constant is the one for which int phi/(t.l)^2 = int t.V/(t.l) holds);
    psi is fixed to zero mean over the sphere of the time axis t.
    """
    probe = check_quad if check_quad is not None else sphere_quadrature(12)
    lp = probe.null_directions()
    q = float(np.max(np.abs(mdot(lp, Vplus(lp)))))
    if q > charge_tol:
        raise ChargedFieldError(f"decomposition needs l.V = 0 (found |l.V| up to {q:.3g})")

    def direction(l):
        s = np.asarray(l, dtype=float)[..., 1:]
        return s / np.linalg.norm(s, axis=-1, keepdims=True)

    def evaluate(l, which):
        n = direction(l)
        flat = n.reshape(-1, 3)
        vals = _kernel_potentials(Vplus, flat, order)[which]
        return vals.reshape(n.shape[:-1])

    _, psi_probe = _kernel_potentials(Vplus, probe.nodes, order)
    psi_mean = probe.integrate(psi_probe) / FOUR_PI

    phi = HomogeneousFn(lambda l: evaluate(l, 0), 0)
    psi = HomogeneousFn(lambda l: evaluate(l, 1) - psi_mean, 0)
    residual = None
    if with_residual:
        residual = reconstruction_residual(Vplus, phi, psi, probe)
    return PotentialPair(phi, psi, residual)


def tangent_from_potentials(phi, psi, l, step=FD_STEP):
    """V_vec tangent part rebuilt from gradients of the potentials (rest frame t)."""
    gphi = gradient(phi, l, step)[..., 1:]
    gpsi = gradient(psi, l, step)[..., 1:]
    n = np.asarray(l)[..., 1:] / np.asarray(l)[..., :1]
    return -gphi, np.cross(n, gpsi)
