"""Symplectic forms of free fields and truncated Fock-space checks."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

from .asymptotics import TWO_PI, kirchhoff_eval
from .currents import AsymptoteProfile
from .errors import BasisTooSmallError, DivergenceError, InconsistentInputError
from .lorentz import ETA, lower, mdot, rotation_to
from .numerics import (
    FOUR_PI,
    SGrid,
    _gauss_legendre,
    _product_rule,
    resolve_quadrature,
    sphere_quadrature,
    uniform_grid,
)


@dataclass(frozen=True)
class SymplecticPair:
    V1: object
    V2: object
    J1: Optional[object] = None
    J2: Optional[object] = None


def _epsilon(V):
    return getattr(V, "epsilon", np.inf)


# --------------------------------------------------------------------------
# null form


def symp_null(V1, V2, quad=16, s_half=40.0, n_s=2001):
    """{V1, V2} = 1/4pi int (V1'.V2 - V2'.V1) ds d^2l.

    The s grid is scaled by t.l on every node; finite decay exponents get the
    power-tail correction of ``SGrid``.
    """
    eps = min(_epsilon(V1), _epsilon(V2))
    if not eps > 0:
        raise DivergenceError("pairing of Coulomb-rate (epsilon = 0) profiles is not integrable",
                              {"epsilon": eps})
    q = resolve_quadrature(quad)
    l = q.null_directions()
    sig = uniform_grid(-s_half, s_half, n_s)
    s = sig[:, None] * l[None, :, 0]
    L = np.broadcast_to(l, s.shape + (4,))
    integrand = mdot(V1.vdot(s, L), V2(s, L)) - mdot(V2.vdot(s, L), V1(s, L))
    per_node = np.array([SGrid(s[:, j], integrand[:, j], eps).integral() for j in range(len(l))])
    return float(q.integrate(per_node) / FOUR_PI)


def shifted_profile(V, Vplus):
    """V(s, l) + V+(l): the transformation by an s-independent addition."""
    def func(s, l):
        return V(s, l) + Vplus(l)
    return AsymptoteProfile(func, getattr(V, "charge", 0.0), _epsilon(V), V.vdot, V.vddot,
                            lambda l: V.minus(l) + Vplus(l), lambda l: V.plus(l) + Vplus(l))


def symp_shift_law(V1, V2, V1plus, V2plus, quad=16):
    """(recomputed {V1+V1+, V2+V2+}, predicted value, correction)."""
    q = resolve_quadrature(quad)
    l = q.null_directions()
    base = symp_null(V1, V2, q)
    correction = -q.integrate(mdot(V1.minus(l), V2plus(l)) - mdot(V2.minus(l), V1plus(l))) / FOUR_PI
    shifted = symp_null(shifted_profile(V1, V1plus), shifted_profile(V2, V2plus), q)
    return shifted, base + float(correction), float(correction)


# --------------------------------------------------------------------------
# Gaussian test currents


@dataclass(frozen=True)
class GaussianCurrent:
    """Conserved current J_a = m_ab d^b g with g(x) = exp(-|x - c|^2_E/(2 sigma^2)).

    ``m`` is antisymmetric (covariant indices), ``|.|_E`` the Euclidean norm.
    Its null profile is V_a(s, l) = m_ab l^b G'(s, l), G the Radon transform of g.
    """

    m: np.ndarray
    center: np.ndarray = field(default_factory=lambda: np.zeros(4))
    sigma: float = 0.5

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (4, 4) or np.max(np.abs(m + m.T)) > 1e-12:
            raise InconsistentInputError("m must be an antisymmetric 4x4 matrix")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @classmethod
    def random(cls, rng, sigma=None, spread=0.5):
        a = rng.normal(size=(4, 4))
        return cls(a - a.T, rng.normal(scale=spread, size=4),
                   float(rng.uniform(0.4, 0.7)) if sigma is None else sigma)

    def density(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return np.exp(-0.5 * np.sum(d * d, axis=-1) / self.sigma**2)

    def __call__(self, x):
        """Contravariant J^a(x)."""
        d = np.asarray(x, dtype=float) - self.center
        dg_up = -(d @ ETA) / self.sigma**2  # d^b g / g, Euclidean gradient with index raised
        J_low = np.einsum("ab,...b->...a", self.m, dg_up) * self.density(x)[..., None]
        return J_low @ ETA

    def _G(self, s, l, k):
        l = np.asarray(l, dtype=float)
        lam = l[..., 0]
        tau = np.sqrt(2.0) * self.sigma * lam
        u = np.asarray(s, dtype=float) - mdot(self.center, l)
        amp = (TWO_PI * self.sigma**2) ** 1.5 / (np.sqrt(2.0) * lam)
        g = amp * np.exp(-0.5 * (u / tau) ** 2)
        z = u / tau
        # d^k/ds^k exp(-z^2/2) = (-1)^k He_k(z) exp(-z^2/2) / tau^k
        z2 = z * z
        he = (z, z2 - 1.0, z * (z2 - 3.0))[k - 1]
        return (-1) ** k * he * g / tau**k

    def _pol(self, l):
        return np.einsum("ab,...b->...a", self.m, np.asarray(l, dtype=float)) @ ETA

    def profile(self):
        def make(k):
            return lambda s, l: self._G(s, l, k)[..., None] * self._pol(l)

        def zero(l):
            return np.zeros(np.shape(l))

        prof = AsymptoteProfile(make(1), 0.0, np.inf, make(2), make(3), zero, zero)
        return CurrentProfile(prof, self)


@dataclass(frozen=True)
class CurrentProfile:
    """Null profile of a Gaussian current, with the analytic Fourier transform."""

    base: AsymptoteProfile
    current: GaussianCurrent

    def __call__(self, s, l):
        return self.base(s, l)

    def vdot(self, s, l):
        return self.base.vdot(s, l)

    def vddot(self, s, l):
        return self.base.vddot(s, l)

    def minus(self, l):
        return self.base.minus(l)

    def plus(self, l):
        return self.base.plus(l)

    epsilon = np.inf
    charge = 0.0

    def fourier(self, omega, l):
        """1/2pi int V'(s, l) e^{i omega s} ds."""
        J = self.current
        omega = np.asarray(omega, dtype=float)
        l = np.asarray(l, dtype=float)
        lam = l[..., 0]
        tau = np.sqrt(2.0) * J.sigma * lam
        amp = (TWO_PI * J.sigma**2) ** 1.5 / (np.sqrt(2.0) * lam)
        w = omega[..., None] if omega.ndim else omega
        val = (-w * w) * amp * np.sqrt(TWO_PI) * tau * np.exp(1j * w * mdot(J.center, l)
                                                               - 0.5 * (w * tau) ** 2) / TWO_PI
        return val[..., None] * J._pol(l)


# --------------------------------------------------------------------------
# Cauchy and current forms


def _potentials_many(profile, X, l, w):
    """A^a and F_ab at points X (n, 4) for per-point sphere rules l (n, m, 4), w (n, m)."""
    s = mdot(X[:, None, :], l)
    A = -np.einsum("nm,nma->na", w, profile.vdot(s, l)) / TWO_PI
    vdd = lower(profile.vddot(s, l))
    ll = lower(l)
    F = -np.einsum("nm,nma,nmb->nab", w, ll, vdd) / TWO_PI
    return A, F - np.swapaxes(F, 1, 2)


def _slice_rules(points, r, band, mu_order, n_phi):
    """Rotated (mu, phi) rules about each point direction, panelled around the s-band."""
    b = min(0.5, band / r) if r > 0 else 1.0
    edges = [-1.0, -b, b, 1.0] if b < 1.0 else [-1.0, 1.0]
    # the s-band shrinks like 1/r in mu, so the central panel gets more nodes
    central = int(np.ceil(mu_order * max(1.0, r / band)))
    mus, wts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, wx = _gauss_legendre(central if lo < 0 < hi else mu_order)
        half = 0.5 * (hi - lo)
        mus.append(0.5 * (lo + hi) + half * x)
        wts.append(half * wx)
    base = _product_rule(np.concatenate(mus), np.concatenate(wts), n_phi)
    nodes = []
    for p in points:
        rot = rotation_to(p) if np.linalg.norm(p) > 0 else np.eye(3)
        nodes.append(base.nodes @ rot.T)
    nodes = np.array(nodes)
    l = np.concatenate([np.ones(nodes.shape[:-1] + (1,)), nodes], axis=-1)
    return l, np.broadcast_to(base.weights, nodes.shape[:-1])


def symp_cauchy(V1, V2, radii=(8.0, 16.0, 32.0), n_r=10, panel=2.0, ang_order=10, mu_order=16,
                n_phi=24, band=8.0, time=0.0):
    """sigma(A1, A2) = 1/4pi int (F1^{0b} A2_b - F2^{0b} A1_b) d^3x on the slice x0 = time.

    Fields come from the Kirchhoff representation of the null data.  The ball
    integral is accumulated shell by shell (radial Gauss-Legendre panels of
    width ``panel`` inside the first radius, one panel per further shell); the
    report holds the value for each radius in ``radii`` and the change over the
    last doubling as tail estimate.
    """
    ang = sphere_quadrature(ang_order)
    x, wx = _gauss_legendre(n_r)
    total = 0.0
    partial = []
    lo = 0.0
    for k, hi in enumerate(radii):
        n_panels = max(1, int(np.ceil((hi - lo) / panel))) if k == 0 else 1
        for a, b in zip(np.linspace(lo, hi, n_panels + 1)[:-1], np.linspace(lo, hi, n_panels + 1)[1:]):
            half = 0.5 * (b - a)
            for r, wr in zip(0.5 * (a + b) + half * x, half * wx):
                total += wr * r * r * _shell_density(V1, V2, r, ang, band, mu_order, n_phi, time)
        partial.append(total)
        lo = hi
    tail = abs(partial[-1] - partial[-2]) if len(partial) > 1 else float("nan")
    return {"value": float(total), "partial": [float(p) for p in partial], "tail": float(tail)}


def _shell_density(V1, V2, r, ang, band, mu_order, n_phi, time):
    pts = r * ang.nodes
    X = np.concatenate([np.full((len(pts), 1), time), pts], axis=1)
    l, w = _slice_rules(ang.nodes, r, band, mu_order, n_phi)
    A1, F1 = _potentials_many(V1, X, l, w)
    A2, F2 = _potentials_many(V2, X, l, w)
    # F^{0b} A_b = F_{0b} A^b
    dens = np.einsum("nb,nb->n", F1[:, 0, :], A2) - np.einsum("nb,nb->n", F2[:, 0, :], A1)
    return float(ang.weights @ dens) / FOUR_PI


def _hermite_rule(n):
    x, w = np.polynomial.hermite.hermgauss(n)
    return x, w


def symp_current(J1, J2, n_gh=10, quad=16, n_radon=3, s_half=12.0, n_s=201, chunk=512):
    """{J1, J2}_c two ways: 1/2 int (J1.A2 - J2.A1) dx, and the local form int J1.A2 dx
    evaluated through the numerically Radon-transformed J1 paired with V2'.

    Returns ``{"current": ..., "local": ...}``.
    """
    q = resolve_quadrature(quad)
    l = q.null_directions()
    P1, P2 = J1.profile(), J2.profile()

    def pair(Ja, Pb):
        xh, wh = _hermite_rule(n_gh)
        grid = np.stack(np.meshgrid(xh, xh, xh, xh, indexing="ij"), -1).reshape(-1, 4)
        wgt = np.prod(np.stack(np.meshgrid(wh, wh, wh, wh, indexing="ij"), -1).reshape(-1, 4), -1)
        scale = np.sqrt(2.0) * Ja.sigma
        X = Ja.center + scale * grid
        J = Ja(X) / Ja.density(X)[:, None]
        total = 0.0
        for start in range(0, len(X), chunk):
            sl = slice(start, start + chunk)
            n = len(X[sl])
            A, _ = _potentials_many(Pb, X[sl], np.broadcast_to(l, (n,) + l.shape),
                                    np.broadcast_to(q.weights, (n, len(l))))
            total += float(wgt[sl] @ mdot(J[sl], A))
        return scale**4 * total

    current = 0.5 * (pair(J1, P2) - pair(J2, P1))
    # local form: -1/2pi int d^2l int ds V^{J1}(s, l).V2'(s, l)
    sig = uniform_grid(-s_half, s_half, n_s)
    acc = np.empty(len(l))
    for j, lj in enumerate(l):
        s = mdot(J1.center, lj) + sig * lj[0] * J1.sigma
        VJ = radon_current(J1, s, lj, n_radon)
        acc[j] = SGrid(s, mdot(VJ, P2.vdot(s, np.broadcast_to(lj, (len(s), 4))))).integral()
    local = -float(q.integrate(acc)) / TWO_PI
    return {"current": float(current), "local": local}


def radon_current(J, s, l, n_gh=6):
    """int delta(s - x.l) J(x) d^4x on the hyperplanes x.l = s, by 3-D Gauss-Hermite."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    l = np.asarray(l, dtype=float)
    nE = l * np.array([1.0, -1.0, -1.0, -1.0])  # x.l = Euclidean x . nE
    norm = float(np.linalg.norm(nE))
    e0 = nE / norm
    basis = np.linalg.svd(e0[None, :])[2][1:]  # three Euclidean unit vectors orthogonal to e0
    xh, wh = _hermite_rule(n_gh)
    grid = np.stack(np.meshgrid(xh, xh, xh, indexing="ij"), -1).reshape(-1, 3)
    wgt = np.prod(np.stack(np.meshgrid(wh, wh, wh, indexing="ij"), -1).reshape(-1, 3), -1)
    scale = np.sqrt(2.0) * J.sigma
    alpha = (s - mdot(J.center, l)) / norm
    X = (J.center + alpha[:, None, None] * e0 + scale * (grid @ basis)[None])
    along = np.exp(-0.5 * (alpha / J.sigma) ** 2)
    vals = J(X) / J.density(X)[..., None]
    return scale**3 * np.einsum("k,skb->sb", wgt, vals) * along[:, None] / norm


# --------------------------------------------------------------------------
# Fock layer


def _log_omega_rule(omega_min, omega_max, panel_order=16, panels_per_unit=1.0):
    a, b = np.log(omega_min), np.log(omega_max)
    n = max(1, int(np.ceil((b - a) * panels_per_unit)))
    x, w = _gauss_legendre(panel_order)
    edges = np.linspace(a, b, n + 1)
    u = ((edges[:-1, None] + edges[1:, None]) + (edges[1:, None] - edges[:-1, None]) * x) / 2
    wu = (edges[1:, None] - edges[:-1, None]) / 2 * w
    return np.exp(u.ravel()), wu.ravel()


def _zero_mode(data, l):
    return data.fourier(np.float64(0.0), l)


def fock_product(d1, d2, quad=16, omega_min=None, omega_max=50.0, tol=1e-10):
    """(f1, f2) = -int d^2l int_0^inf conj(f1).f2 domega/omega with f = V~' of the data.

    An infrared-singular argument (f(0, l) != 0) without ``omega_min`` raises
    DivergenceError.
    """
    q = resolve_quadrature(quad)
    l = q.null_directions()
    if omega_min is None:
        z1 = np.max(np.abs(_zero_mode(d1, l)))
        z2 = np.max(np.abs(_zero_mode(d2, l)))
        if z1 > tol and z2 > tol:
            raise DivergenceError("Fock product of infrared-singular profiles diverges at omega -> 0",
                                  {"zero_modes": (float(z1), float(z2))})
        omega_min = 1e-12
    om, wom = _log_omega_rule(omega_min, omega_max)
    f1 = d1.fourier(om, l)
    f2 = d2.fourier(om, l)
    dens = mdot(np.conj(f1), f2)  # (n_omega, n_l)
    return complex(-(wom @ dens) @ q.weights)


def ir_divergence_scan(data, omega_mins=None, quad=16, omega_max=50.0):
    """(f, f) truncated below omega_min; fit value = a ln(1/omega_min) + b.

    Returns the samples, the fit and the predicted a = -int conj f(0).f(0) d^2l.
    """
    omega_mins = np.asarray(omega_mins if omega_mins is not None else 10.0 ** -np.arange(3, 9),
                            dtype=float)
    q = resolve_quadrature(quad)
    l = q.null_directions()
    values = np.array([fock_product(data, data, q, w, omega_max).real for w in omega_mins])
    design = np.stack([np.log(1.0 / omega_mins), np.ones_like(omega_mins)], axis=1)
    (a, b), *_ = np.linalg.lstsq(design, values, rcond=None)
    f0 = _zero_mode(data, l)
    expected = -float(q.integrate(mdot(np.conj(f0), f0).real))
    return {"omega_min": omega_mins, "value": values, "slope": float(a), "intercept": float(b),
            "expected_slope": expected}


@dataclass(frozen=True)
class ModeBasis:
    """Orthonormal modes e_k = sum_j f_j C_jk built from raw IR-regular data f_j."""

    raw: tuple
    coeffs: np.ndarray
    gram: np.ndarray
    quad: int = 16

    @classmethod
    def build(cls, raw, quad=16):
        raw = tuple(raw)
        for d in raw:
            if np.max(np.abs(_zero_mode(d, resolve_quadrature(quad).null_directions()))) > 1e-10:
                raise InconsistentInputError("mode basis profiles must be infrared regular")
        n = len(raw)
        gram = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                gram[i, j] = fock_product(raw[i], raw[j], quad)
                gram[j, i] = np.conj(gram[i, j])
        chol = np.linalg.cholesky(gram)  # gram = L L^H
        coeffs = np.linalg.inv(chol.conj().T)
        return cls(raw, coeffs, gram, quad)

    def __len__(self):
        return len(self.raw)

    def gram_residual(self):
        C = self.coeffs
        return float(np.max(np.abs(C.conj().T @ self.gram @ C - np.eye(len(self)))))

    def overlaps(self, data):
        """beta_k = (e_k, f) for the data f."""
        g = np.array([fock_product(r, data, self.quad) for r in self.raw])
        return self.coeffs.conj().T @ g

    def projection_error(self, data):
        beta = self.overlaps(data)
        norm = fock_product(data, data, self.quad).real
        return float(max(norm - np.sum(np.abs(beta) ** 2), 0.0))


def _annihilators(n_modes, cutoff):
    a1 = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)
    eye = np.eye(cutoff + 1)
    ops = []
    for k in range(n_modes):
        op = np.array([[1.0]])
        for j in range(n_modes):
            op = np.kron(op, a1 if j == k else eye)
        ops.append(op)
    return ops


def field_operator(beta, ops):
    """Phi = sum conj(beta_k) a_k + beta_k a_k^dagger."""
    out = 0.0
    for b, a in zip(beta, ops):
        out = out + np.conj(b) * a + b * a.conj().T
    return out


def _occupations(n_modes, cutoff):
    grids = np.meshgrid(*[np.arange(cutoff + 1)] * n_modes, indexing="ij")
    return sum(g.ravel() for g in grids)


def coherent_shift_check(V, V1, basis, cutoff=6, low=2, proj_tol=1e-8, quad=16):
    """W Phi(V) W^* against Phi(V) + {V, V1} with W = exp(i Phi(V1)) in the truncated space.

    The matrix residual is taken on states with total occupation <= ``low``.
    """
    errs = {"V": basis.projection_error(V), "V1": basis.projection_error(V1)}
    if max(errs.values()) > proj_tol:
        raise BasisTooSmallError(f"projection errors {errs} exceed {proj_tol}")
    ops = _annihilators(len(basis), cutoff)
    phi = field_operator(basis.overlaps(V), ops)
    phi1 = field_operator(basis.overlaps(V1), ops)
    W = expm(1j * phi1)
    lhs = W @ phi @ W.conj().T
    sympl = symp_null(V, V1, quad)
    rhs = phi + sympl * np.eye(len(phi))
    keep = _occupations(len(basis), cutoff) <= low
    residual = float(np.max(np.abs((lhs - rhs)[np.ix_(keep, keep)])))
    commutator = (phi @ phi1 - phi1 @ phi)[np.ix_(keep, keep)]
    comm_residual = float(np.max(np.abs(commutator[0:1, 0:1] - 1j * sympl)))
    return {
        "residual": residual,
        "vacuum_mean": float(lhs[0, 0].real),
        "symplectic": sympl,
        "commutator_residual": comm_residual,
        "projection_error": errs,
        "dimension": len(phi),
    }
