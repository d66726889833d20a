"""Free fields from null data, their null and spacelike asymptotes, Fourier profiles.

Conventions: four-vectors are contravariant arrays, field tensors F_ab are
covariant.  A free field is fixed by its future null profile V(s, l) with
V(+inf, l) = 0; the potential is A_a(x) = -1/2pi int V'_a(x.l, l) d^2l.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import erf, eval_hermitenorm

from .celestial import HomogeneousFn, box, gradient, l_tensor
from .currents import AsymptoteProfile, current_profile
from .errors import (
    CannotIntegrateError,
    DivergenceError,
    InconsistentInputError,
    InvalidGridError,
    OutOfDomainError,
)
from .lorentz import EPS, ETA, T_AXIS, lower, mdot, msquare, wedge
from .numerics import (
    FOUR_PI,
    Mollifier,
    _gauss_legendre,
    filon_fourier,
    focused_quadrature,
    limit_extrapolate,
    power_tail_fourier,
    resolve_quadrature,
    sphere_quadrature,
    uniform_grid,
)

TWO_PI = 2.0 * np.pi


# --------------------------------------------------------------------------
# polarizations: degree -1 vector functions E(l) with l.E = 0 off the cone too


def electric_polarization(velocities, weights):
    """E(l) = sum c_i v_i/(v_i.l) with sum c_i = 0 (electric type)."""
    vs = [np.asarray(v, dtype=float) for v in velocities]
    cs = [float(c) for c in weights]
    if abs(sum(cs)) > 1e-12:
        raise InconsistentInputError("weights of an electric polarization must sum to zero")

    def E(l):
        l = np.asarray(l, dtype=float)
        out = np.zeros(l.shape)
        for c, v in zip(cs, vs):
            out = out + c * v / mdot(v, l)[..., None]
        return out
    return E


def magnetic_polarization(p, k, u=T_AXIS):
    """E^a(l) = eps^a_bcd l^b p^c k^d / (u.l)^2 (magnetic type)."""
    p = np.asarray(p, dtype=float)
    k = np.asarray(k, dtype=float)
    u = np.asarray(u, dtype=float)
    eps_up = np.einsum("ae,ebcd->abcd", ETA, EPS)

    def E(l):
        l = np.asarray(l, dtype=float)
        out = np.einsum("abcd,...b,c,d->...a", eps_up, l, p, k)
        return out / (mdot(u, l) ** 2)[..., None]
    return E


def transverse_polarization(w, u=T_AXIS):
    """E(l) = [w - (w.l) u/(u.l)]/(u.l)."""
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)

    def E(l):
        l = np.asarray(l, dtype=float)
        ul = mdot(u, l)[..., None]
        return (w - mdot(w, l)[..., None] * u / ul) / ul
    return E


# --------------------------------------------------------------------------
# s-shapes h(sigma) with derivatives and Fourier transforms


def _shape_step(sigma, k):
    if k == 0:
        return 0.5 * (1.0 - erf(sigma))
    g = np.exp(-sigma * sigma) / np.sqrt(np.pi)
    return -g if k == 1 else 2.0 * sigma * g


def _shape_hermite(n):
    def h(sigma, k):
        return (-1) ** k * eval_hermitenorm(n + k, sigma) * np.exp(-0.5 * sigma * sigma)
    return h


@dataclass(frozen=True)
class FreeFieldData:
    """Free-field null data V(s, l) = amplitude * E(l) h(sigma), sigma = s/(w u.l) - c.

    ``shape`` 'step' gives V(-inf) = E (infrared singular), 'hermite' with
    index n gives a profile vanishing at both ends (infrared regular).
    Instances add: the sum of free fields is free.
    """

    polarization: Callable
    shape: str = "hermite"
    index: int = 0
    width: float = 1.0
    center: float = 0.0
    frame: np.ndarray = field(default_factory=lambda: T_AXIS.copy())
    amplitude: float = 1.0
    parts: tuple = ()

    def _terms(self):
        return self.parts if self.parts else (self,)

    def _h(self):
        return _shape_step if self.shape == "step" else _shape_hermite(self.index)

    def _sigma(self, s, l):
        U = mdot(self.frame, l)
        return np.asarray(s) / (self.width * U) - self.center, U

    def _eval(self, s, l, k):
        out = 0.0
        for term in self._terms():
            sigma, U = term._sigma(s, l)
            h = term._h()(sigma, k) / (term.width * U) ** k
            out = out + term.amplitude * h[..., None] * term.polarization(l)
        return out

    def __call__(self, s, l):
        return self._eval(np.asarray(s, float), np.asarray(l, float), 0)

    def vdot(self, s, l):
        return self._eval(np.asarray(s, float), np.asarray(l, float), 1)

    def vddot(self, s, l):
        return self._eval(np.asarray(s, float), np.asarray(l, float), 2)

    def minus(self, l):
        """V(-inf, l)."""
        l = np.asarray(l, dtype=float)
        out = np.zeros(l.shape)
        for term in self._terms():
            if term.shape == "step":
                out = out + term.amplitude * term.polarization(l)
        return out

    def plus(self, l):
        return np.zeros(np.shape(l))

    @property
    def epsilon(self):
        return np.inf

    @property
    def charge(self):
        return 0.0

    def fourier(self, omega, l):
        """Analytic 1/2pi int V'(s, l) e^{i omega s} ds; shape omega.shape + l.shape."""
        omega = np.asarray(omega, dtype=float)
        l = np.asarray(l, dtype=float)
        out = 0.0
        for term in self._terms():
            U = mdot(term.frame, l)
            kappa = omega[..., None] * (term.width * U) if omega.ndim else omega * term.width * U
            phase = np.exp(1j * kappa * term.center)
            if term.shape == "step":
                core = -np.exp(-0.25 * kappa**2)
            else:
                n = term.index + 1
                core = -np.sqrt(TWO_PI) * (1j * kappa) ** n * np.exp(-0.5 * kappa**2)
            val = term.amplitude * phase * core / TWO_PI
            out = out + val[..., None] * term.polarization(l)
        return out

    def fourier_zero(self, l):
        return self.fourier(np.float64(0.0), l)

    def profile(self):
        """The same data as an AsymptoteProfile."""
        return AsymptoteProfile(self.__call__, 0.0, np.inf, self.vdot, self.vddot,
                                self.minus, self.plus)

    def past(self):
        """Past asymptote V'(s, l) = V(-inf, l) - V(s, l)."""
        def func(s, l):
            return self.minus(l) - self(s, l)
        return AsymptoteProfile(func, 0.0, np.inf, lambda s, l: -self.vdot(s, l),
                                lambda s, l: -self.vddot(s, l),
                                lambda l: np.zeros(np.shape(l)), self.minus)

    def __add__(self, other):
        return FreeFieldData(self.polarization, parts=self._terms() + other._terms())

    def scaled(self, c):
        terms = tuple(FreeFieldData(t.polarization, t.shape, t.index, t.width, t.center,
                                    t.frame, c * t.amplitude) for t in self._terms())
        return FreeFieldData(self.polarization, parts=terms)

    def is_singular(self):
        return any(t.shape == "step" for t in self._terms())


def zero_field():
    return FreeFieldData(lambda l: np.zeros(np.shape(l)), amplitude=0.0)


def random_free_field(rng, singular=False, n_terms=2):
    """Random combination of electric, magnetic and transverse polarizations."""
    total = None
    for i in range(n_terms):
        kind = rng.integers(3)
        if kind == 0:
            from .lorentz import random_four_velocity
            vs = [random_four_velocity(rng, 0.8) for _ in range(2)]
            E = electric_polarization(vs, [1.0, -1.0])
        elif kind == 1:
            E = magnetic_polarization(rng.normal(size=4), rng.normal(size=4))
        else:
            E = transverse_polarization(rng.normal(size=4))
        shape = "step" if (singular and i == 0) else "hermite"
        term = FreeFieldData(E, shape, int(rng.integers(0, 3)), float(rng.uniform(0.5, 1.5)),
                             float(rng.uniform(-0.5, 0.5)), amplitude=float(rng.normal()))
        total = term if total is None else total + term
    return total


# --------------------------------------------------------------------------
# Kirchhoff reconstruction and null asymptotes


def _check_decay(data):
    eps = getattr(data, "epsilon", None)
    if eps is None or not eps > 0:
        raise CannotIntegrateError("profile must declare a decay exponent epsilon > 0")


def kirchhoff_eval(data, x, quad=32):
    """Potential A^a(x) and field F_ab(x) of the free field with null data ``data``."""
    _check_decay(data)
    x = np.asarray(x, dtype=float)
    q = resolve_quadrature(quad, x)
    l = q.null_directions()
    s = mdot(l, x)
    A = -q.integrate(data.vdot(s, l)) / TWO_PI
    vdd = lower(data.vddot(s, l))
    F = -q.integrate(wedge(lower(l), vdd)) / TWO_PI
    return A, F


def kirchhoff_sampler(data, quad=None, order=32):
    """x -> (A, F); by default the sphere rule is re-focused for each x."""
    if quad is None:
        def quad(x):
            return focused_quadrature(x, order)
    return lambda x: kirchhoff_eval(data, x, quad)


def coulomb_sampler(particle, origin=None):
    """Exact (A, F) of an inertial charge through ``origin``: A = q v/sqrt((v.x)^2 - x^2)."""
    v = np.asarray(particle.velocity, dtype=float)
    q = particle.charge
    x0 = np.zeros(4) if origin is None else np.asarray(origin, dtype=float)

    def sample(x):
        y = np.asarray(x, dtype=float) - x0
        vy = mdot(v, y)
        rho2 = vy * vy - msquare(y)
        rho = np.sqrt(rho2)
        A = q * v / rho
        # d_a rho = (vy v_a - y_a)/rho
        drho = (vy * lower(v) - lower(y)) / rho
        dA = -q * np.outer(drho, lower(v)) / rho2  # d_a A_b
        return A, dA - dA.T
    return sample


@dataclass(frozen=True)
class NullAsymptote:
    V: np.ndarray
    V_error: float
    lV: np.ndarray
    lV_error: float
    radii: np.ndarray
    trace_A: np.ndarray
    trace_F: np.ndarray


def extract_null_asymptote(sampler, x, l, direction=+1, R0=1.0, levels=13, tol=1e-3,
                           degree=6):
    """lim R A(x +- R l) and lim R F(x +- R l) by extrapolation in 1/R.

    ``R = R0 2^k`` for k < levels.  Raises DivergenceError (with the report)
    when the error estimate exceeds ``tol``.
    """
    x = np.asarray(x, dtype=float)
    l = np.asarray(l, dtype=float)
    radii = R0 * 2.0 ** np.arange(levels)
    As, Fs = [], []
    for R in radii:
        A, F = sampler(x + direction * R * l)
        As.append(R * A)
        Fs.append(R * F)
    As, Fs = np.array(As), np.array(Fs)
    V, eV = limit_extrapolate(1.0 / radii, As, degree)
    lV, elV = limit_extrapolate(1.0 / radii, Fs, degree)
    report = NullAsymptote(V, float(np.max(eV)), lV, float(np.max(elV)), radii, As, Fs)
    if max(report.V_error, report.lV_error) > tol:
        raise DivergenceError(
            f"null limit did not settle (errors {report.V_error:.2e}, {report.lV_error:.2e})",
            report)
    return report


def profile_wedge(profile, s, l):
    """l_a V'_b - l_b V'_a (covariant), the null asymptote of R F."""
    return wedge(lower(l), lower(profile.vdot(s, l)))


# --------------------------------------------------------------------------
# total asymptotes and matching


def total_asymptotes(event, incoming):
    """Future/past asymptotes of the total field of ``event`` plus an incoming free field.

    Returns a dict with V, V' (``V_past``), V^j and the free parts V^out, V^in'.
    """
    Vj = current_profile(event)
    vin = incoming.profile()
    V = Vj + vin
    Vj_minus = AsymptoteProfile.static(Vj.minus, Vj.charge)
    V_past = Vj_minus + incoming.past()
    Vj_plus = AsymptoteProfile.static(Vj.plus, Vj.charge)
    return {
        "V": V,
        "V_past": V_past,
        "Vj": Vj,
        "out": (Vj - Vj_plus) + vin,
        "in_past": incoming.past(),
    }


def matching_verify(V, V_past, Vj, samples=None, rng=None, n=200, out=None, in_past=None):
    """Sup-norm residuals of the matching relations on random (s, l) samples."""
    if abs(V.charge - V_past.charge) > 1e-12 or abs(V.charge - Vj.charge) > 1e-12:
        raise InconsistentInputError("profiles carry different charges")
    if samples is None:
        rng = np.random.default_rng(0) if rng is None else rng
        nvec = rng.normal(size=(n, 3))
        nvec /= np.linalg.norm(nvec, axis=1, keepdims=True)
        scale = rng.uniform(0.3, 3.0, size=n)
        l = scale[:, None] * np.concatenate([np.ones((n, 1)), nvec], axis=1)
        s = rng.normal(scale=3.0, size=n)
    else:
        s, l = samples
    Vm = V.minus(l)
    res = {
        "match": V(s, l) + V_past(s, l) - Vj(s, l) - Vm,
        "antipodal": Vm - V_past.plus(l),
        "future_edge": V.plus(l) - Vj.plus(l),
        "past_edge": V_past.minus(l) - Vj.minus(l),
        "gauss_future": mdot(l, V(s, l)) - V.charge,
        "gauss_past": mdot(l, V_past(s, l)) - V_past.charge,
    }
    if out is not None:
        res["out_def"] = out(s, l) - (V(s, l) - V.plus(l))
    if in_past is not None:
        res["in_past_def"] = in_past(s, l) - (V_past(s, l) - V_past.minus(l))
    return {k: float(np.max(np.abs(v))) for k, v in res.items()}


# --------------------------------------------------------------------------
# spacelike asymptotes


def _require_spacelike(y):
    y = np.asarray(y, dtype=float)
    if msquare(y) >= 0:
        raise OutOfDomainError("spacelike asymptote needs y.y < 0")
    return y


def spacelike_tail(Vminus, y, order=32, widths=None, with_error=False):
    """A^as(y) = 1/2pi int V(l) delta(y.l), F^as_ab(y) = 1/2pi int l^V delta'(y.l).

    The distributions are Gaussian-mollified with widths h_k = h_0 2^-k and
    the result is extrapolated to h = 0 in the variable h^2.
    """
    y = _require_spacelike(y)
    r = float(np.linalg.norm(y[1:]))
    if widths is None:
        widths = 0.05 * r * 2.0 ** -np.arange(5)
    q = focused_quadrature(y, order)
    l = q.null_directions()
    u = mdot(l, y)
    V = np.asarray(Vminus(l), dtype=float)
    lv = wedge(lower(l), lower(V))
    As, Fs = [], []
    for h in widths:
        As.append(q.integrate(Mollifier("delta", h)(u)[:, None] * V) / TWO_PI)
        Fs.append(q.integrate(Mollifier("delta_prime", h)(u)[:, None, None] * lv) / TWO_PI)
    h2 = np.asarray(widths) ** 2
    A, eA = limit_extrapolate(h2, np.array(As))
    F, eF = limit_extrapolate(h2, np.array(Fs))
    if with_error:
        return A, F, float(np.max(eA)), float(np.max(eF))
    return A, F


def spacelike_tail_exact(Vminus, y, n_phi=256):
    """The same limits by exact reduction to the circle y.l = 0 (oracle)."""
    y = _require_spacelike(y)
    r = float(np.linalg.norm(y[1:]))
    mu0 = y[0] / r
    from .lorentz import rotation_to

    rot = rotation_to(y[1:] / r)
    phi = TWO_PI * np.arange(n_phi) / n_phi

    def ring(mu):
        st = np.sqrt(1.0 - mu * mu)
        n = np.stack([st * np.cos(phi), st * np.sin(phi), np.full(n_phi, mu)], axis=-1) @ rot.T
        l = np.concatenate([np.ones((n_phi, 1)), n], axis=1)
        V = np.asarray(Vminus(l), dtype=float)
        return V, wedge(lower(l), lower(V))

    dphi = TWO_PI / n_phi
    V0, _ = ring(mu0)
    A = V0.sum(axis=0) * dphi / r / TWO_PI
    d = 1e-4
    derivs = [ring(mu0 + k * d)[1].sum(axis=0) * dphi for k in (-2, -1, 1, 2)]
    g1 = (derivs[0] - 8 * derivs[1] + 8 * derivs[2] - derivs[3]) / (12 * d)
    F = g1 / r**2 / TWO_PI
    return A, F


def general_coulomb_tail(Vdot0plus, y, order=32, etas=None, parts=False):
    """Spacelike asymptotes for data with a (possibly complex) limit V~'(0+, l).

    A^as = i/2pi int V~/(y.l - i0) + c.c.,  F^as = -i/2pi int l^V~/(y.l - i0)^2 + c.c.,
    with i0 -> i eta extrapolated to eta = 0.  With ``parts`` the contributions
    of Re V~ and Im V~ are returned separately as ((A_re, F_re), (A_im, F_im)).
    """
    y = _require_spacelike(y)
    r = float(np.linalg.norm(y[1:]))
    if etas is None:
        etas = 0.02 * r * 2.0 ** -np.arange(6)
    q = focused_quadrature(y, order)
    l = q.null_directions()
    u = mdot(l, y)
    W = np.asarray(Vdot0plus(l), dtype=complex)

    def evaluate(vals):
        lw = wedge(lower(l), lower(vals))
        As, Fs = [], []
        for eta in etas:
            k1 = 1.0 / (u - 1j * eta)
            a = 1j * q.integrate(k1[:, None] * vals) / TWO_PI
            f = -1j * q.integrate((k1 * k1)[:, None, None] * lw) / TWO_PI
            As.append(2.0 * a.real)
            Fs.append(2.0 * f.real)
        A, _ = limit_extrapolate(np.asarray(etas), np.array(As))
        F, _ = limit_extrapolate(np.asarray(etas), np.array(Fs))
        return A, F

    if parts:
        return evaluate(W.real.astype(complex)), evaluate(1j * W.imag)
    return evaluate(W)


def pauli_jordan_check(r=1.0, test=None, widths=None, order=8, panel_order=8):
    """Smear D(x0, r z) over x0 with a test function, two ways.

    Returns (mollified plane-wave form, closed form (g(r) - g(-r))/(4 pi r)).
    The x0 nodes are graded towards the light-cone points x0 = +-r.
    """
    if test is None:
        def test(t):
            return np.exp(-(t - 0.3) ** 2) * (1.0 + 0.5 * t)
    if widths is None:
        widths = 0.1 * r * 2.0 ** -np.arange(4)
    span = r + 8.0
    cuts = {-span, span, -r, r}
    for k in range(12):
        for c in (-r, r):
            for side in (-1.0, 1.0):
                d = min(r, 1.0) * 2.0 ** -k
                cuts.add(c + side * d)
    cuts = np.array(sorted(cuts))
    x, w = _gauss_legendre(panel_order)
    a, b = cuts[:-1], cuts[1:]
    t_nodes = (0.5 * (a + b))[:, None] + 0.5 * (b - a)[:, None] * x
    t_w = 0.5 * (b - a)[:, None] * w
    t_nodes, t_w = t_nodes.ravel(), t_w.ravel()
    plane = []
    for t in t_nodes:
        y = np.array([t, 0.0, 0.0, r])
        q = focused_quadrature(y, order)
        plane.append((q, mdot(q.null_directions(), y)))
    values = []
    for h in widths:
        mol = Mollifier("delta_prime", h)
        d = np.array([-q.integrate(mol(u)) for q, u in plane]) / (8 * np.pi**2)
        values.append(float(np.sum(t_w * test(t_nodes) * d)))
    smeared, _ = limit_extrapolate(np.asarray(widths) ** 2, np.array(values))
    exact = (test(r) - test(-r)) / (4 * np.pi * r)
    return float(smeared), float(exact)


# --------------------------------------------------------------------------
# Fourier profiles and infrared classification


@dataclass(frozen=True)
class FourierProfile:
    """Samples of V~'(omega, l) = 1/2pi int V'(s, l) e^{i omega s} ds."""

    omega: np.ndarray
    directions: np.ndarray
    values: np.ndarray  # (n_omega, n_l, 4)
    weights: Optional[np.ndarray] = None

    def at_zero(self):
        i = int(np.argmin(np.abs(self.omega)))
        if self.omega[i] != 0.0:
            raise InvalidGridError("omega grid does not contain 0")
        return self.values[i]

    def reality_residual(self):
        """max |conj V~(w) - V~(-w)| over mirrored grid pairs."""
        res = 0.0
        for i, w in enumerate(self.omega):
            j = np.where(np.isclose(self.omega, -w, rtol=0, atol=1e-14))[0]
            if len(j):
                res = max(res, float(np.max(np.abs(np.conj(self.values[i]) - self.values[j[0]]))))
        return res

    def minus_limit(self):
        """V(-inf, l) - V(+inf, l) = -2 pi V~'(0, l)."""
        return -TWO_PI * self.at_zero().real


def fourier_profile(data, omega, quad=12, s_range=(-40.0, 40.0), n_s=4001):
    """Filon quadrature of the Fourier transform of V' on each quadrature direction.

    The s grid is scaled by t.l; profiles with finite ``epsilon`` get analytic
    power-law tail corrections fitted on the outer 10% of the grid.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    if not (omega.min() <= 0.0 <= omega.max()) or not np.any(omega == 0.0):
        raise InvalidGridError("omega grid must contain 0")
    q = resolve_quadrature(quad)
    l = q.null_directions()
    sig = uniform_grid(s_range[0], s_range[1], n_s)
    vals = np.zeros((len(omega), len(l), 4), dtype=complex)
    eps = getattr(data, "epsilon", np.inf)
    for j, lj in enumerate(l):
        s = sig * lj[0]
        f = data.vdot(s, np.broadcast_to(lj, (len(s), 4)))
        out = filon_fourier(s, f, omega)
        if np.isfinite(eps):
            k = max(3, len(s) // 10)
            for side, sl in ((-1, slice(0, k)), (1, slice(len(s) - k, len(s)))):
                basis = np.abs(s[sl]) ** (-1.0 - eps)
                coeff = basis @ f[sl] / (basis @ basis)
                edge = s[0] if side < 0 else s[-1]
                out = out + power_tail_fourier(coeff, edge, eps, omega, side)
        vals[:, j] = out / TWO_PI
    return FourierProfile(omega, l, vals, q.weights)


def ir_classify(fprofile, tol=1e-6, scale=None):
    """'singular' iff the sphere-averaged |V~'(0, l)| exceeds tol * scale."""
    zero = np.linalg.norm(fprofile.at_zero(), axis=-1)
    if fprofile.weights is not None:
        mean = float(fprofile.weights @ zero / FOUR_PI)
    else:
        mean = float(np.mean(zero))
    if scale is None:
        scale = float(np.max(np.abs(fprofile.values))) or 1.0
    return ("singular" if mean > tol * scale else "regular"), mean


# --------------------------------------------------------------------------
# the l-dependent gauge function


@dataclass(frozen=True)
class LGTGauge:
    """lambda(x) built from alpha(l) (degree 0) and d^2 alpha (degree -2)."""

    alpha: HomogeneousFn
    box_alpha: HomogeneousFn
    order: int = 32

    def _quad(self, x):
        return focused_quadrature(x, self.order)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        q = self._quad(x)
        l = q.null_directions()
        xl = mdot(x, l)
        x2 = msquare(x)
        if x2 > 0:
            return float(x2 / FOUR_PI * q.integrate(self.alpha(l) / xl**2))
        # log form (l scaled to t.l = 1)
        integrand = np.log(np.abs(xl)) * self.box_alpha(l) - self.alpha(l)
        return float(-q.integrate(integrand) / FOUR_PI)

    def gradient(self, x):
        """d_a lambda(x) (covariant), principal value on x.l = 0."""
        x = np.asarray(x, dtype=float)
        q = self._quad(x)
        l = q.null_directions()
        xl = mdot(x, l)
        return -q.integrate((self.box_alpha(l) / xl)[:, None] * lower(l)) / FOUR_PI


def lgt_gauge(alpha_coeffs, x, order=32):
    """(lambda(x), d lambda(x)) for alpha = sum c_lm Y_lm."""
    from .celestial import harmonic_box, harmonic_function

    g = LGTGauge(harmonic_function(alpha_coeffs), harmonic_box(alpha_coeffs), order)
    return g.value(x), g.gradient(x)


def asymptote_diagnostics(alpha_coeffs, x, l, radii=None, order=32):
    """Large-R behaviour of lambda and d lambda along x +- R l.

    Returns the extrapolated limits of lambda(x +- R l) (expected alpha(l)) and
    the fitted log R coefficient of R d_a lambda(x +- R l) (expected
    -+ 1/2 l_a d^2 alpha(l)).
    """
    from .celestial import harmonic_box, harmonic_function

    alpha = harmonic_function(alpha_coeffs)
    balpha = harmonic_box(alpha_coeffs)
    g = LGTGauge(alpha, balpha, order)
    x = np.asarray(x, dtype=float)
    l = np.asarray(l, dtype=float)
    if radii is None:
        radii = 2.0 ** np.arange(4, 13)
    radii = np.asarray(radii, dtype=float)
    out = {"alpha": float(alpha(l)), "radii": radii}
    for sign, key in ((+1, "future"), (-1, "past")):
        lam = np.array([g.value(x + sign * R * l) for R in radii])
        dlam = np.array([R * g.gradient(x + sign * R * l) for R in radii])
        limit, err = _log_limit(radii, lam)
        slope = _log_slope(radii, dlam)
        out[key] = {
            "lambda": lam,
            "limit": limit,
            "limit_error": err,
            "R_dlambda": dlam,
            "log_coefficient": slope,
            "expected_coefficient": -sign * 0.5 * lower(l) * float(balpha(l)),
        }
    return out


def _log_limit(radii, values):
    """Fit c0 + (c1 + c2 log R)/R + (c3 + c4 log R)/R^2; returns (c0, drift of c0)."""
    def fit(r, v):
        L = np.log(r)
        basis = np.stack([np.ones_like(r), 1 / r, L / r, 1 / r**2, L / r**2], axis=1)
        return np.linalg.lstsq(basis, v, rcond=None)[0][0]
    full = fit(radii, values)
    coarse = fit(radii[:-1], values[:-1])
    return float(full), float(abs(full - coarse))


def _log_slope(radii, values):
    """Fit c log R + d + (e log R + f)/R to R d lambda; returns c (per component)."""
    L = np.log(radii)
    basis = np.stack([L, np.ones_like(L), L / radii, 1 / radii], axis=1)
    return np.linalg.lstsq(basis, values, rcond=None)[0][0]
