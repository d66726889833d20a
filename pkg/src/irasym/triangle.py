"""Charges, the B-field asymptote, memory effects and the soft relation."""
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .asymptotics import (
    TWO_PI,
    fourier_profile,
    ir_classify,
    kirchhoff_eval,
    spacelike_tail_exact,
    total_asymptotes,
)
from .celestial import (
    FD_STEP,
    HomogeneousFn,
    divergence,
    gradient,
    l_tensor,
    potential_decompose,
)
from .errors import InconsistentInputError, OutOfDomainError
from .lorentz import ETA, T_AXIS, lower, mdot, msquare, wedge
from .numerics import (
    FOUR_PI,
    SGrid,
    _gauss_legendre,
    focused_quadrature,
    limit_extrapolate,
    resolve_quadrature,
    sphere_quadrature,
    uniform_grid,
)


def charged_extension(V, charge):
    """Degree -1 extension of V(l) off the cone with l.V = charge exactly.

    V + (q - l.V) t/(t.l); on the cone the correction vanishes when l.V = q there.
    """
    def func(l):
        l = np.asarray(l, dtype=float)
        val = np.asarray(V(l), dtype=float)
        return val + ((charge - mdot(l, val)) / l[..., 0])[..., None] * T_AXIS
    return HomogeneousFn(func, -1, (4,))


# --------------------------------------------------------------------------
# charges


@dataclass(frozen=True)
class ChargeSmearing:
    """Test field V+ (l.V+ = 0, electric type) with its special scalar potential eps+."""

    Vplus: HomogeneousFn
    epsilon_plus: HomogeneousFn
    residual: Optional[float] = None

    @classmethod
    def from_field(cls, Vplus, order=24, with_residual=False):
        pot = potential_decompose(Vplus, order=order, with_residual=with_residual)
        return cls(Vplus, pot.phi, pot.residual)

    @classmethod
    def from_potential(cls, eps, quad=None):
        """V+ built from eps+ so that eps+ is exactly its special potential.

        V+_b = t^a L_ab eps/(t.l) + l_b <eps>/(t.l)^2, <eps> the mean over the t-sphere.
        """
        quad = quad if quad is not None else sphere_quadrature(24)
        mean = float(quad.integrate(eps(quad.null_directions())) / FOUR_PI)

        def func(l):
            l = np.asarray(l, dtype=float)
            L = l_tensor(eps, l)
            cov = L[..., 0, :] / l[..., :1] + (mean / l[..., 0] ** 2)[..., None] * lower(l)
            return lower(cov)
        return cls(HomogeneousFn(func, -1, (4,)), eps)


def charge_functional(smearing, Vminus, charge, quad=None):
    """(Q_form1, Q_form2, discrepancy) for the smearing and the limit V(-inf, l).

    Q_form1 = -1/4pi int V+ . V(-inf);  Q_form2 = 1/4pi int eps+ d.V(-inf) with
    the charged homogeneous extension of V(-inf).
    """
    if smearing.epsilon_plus is None:
        raise InconsistentInputError("smearing has no scalar potential; decompose V+ first")
    q = resolve_quadrature(quad if quad is not None else 32)
    l = q.null_directions()
    V = charged_extension(Vminus, charge)
    q1 = -q.integrate(mdot(smearing.Vplus(l), V(l))) / FOUR_PI
    q2 = q.integrate(smearing.epsilon_plus(l) * divergence(V, l)) / FOUR_PI
    return float(q1), float(q2), float(abs(q1 - q2))


def bump(x, lo, hi):
    """Smooth bump supported in (lo, hi), exp(-1/(1 - z^2))."""
    x = np.asarray(x, dtype=float)
    z = (2.0 * x - lo - hi) / (hi - lo)
    out = np.zeros_like(z)
    inside = np.abs(z) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - z[inside] ** 2))
    return out


@dataclass(frozen=True)
class SpacelikeTestFunction:
    """phi(y) = a(y0) b(r) (1 + yhat.d) with bumps a on (-t_max, t_max), b on (r_lo, r_hi).

    Supported in y^2 < 0 when t_max < r_lo.
    """

    t_max: float = 0.5
    r_lo: float = 1.0
    r_hi: float = 2.0
    d: tuple = (0.3, -0.2, 0.4)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        r = np.linalg.norm(y[..., 1:], axis=-1)
        yhat = y[..., 1:] / r[..., None]
        return (bump(y[..., 0], -self.t_max, self.t_max) * bump(r, self.r_lo, self.r_hi)
                * (1.0 + yhat @ np.asarray(self.d)))

    def epsilon(self, n_nodes=64):
        """eps+(l) = (t.l) int phi(y) delta(y.l) dy = C0 + C1 n.d (closed form in 1-D integrals)."""
        x, w = _gauss_legendre(n_nodes)
        t = self.t_max * x
        wt = self.t_max * w
        a = bump(t, -self.t_max, self.t_max)
        half = 0.5 * (self.r_hi - self.r_lo)
        r = self.r_lo + half * (x + 1.0)
        wr = half * w
        b = bump(r, self.r_lo, self.r_hi)
        c0 = TWO_PI * (wt @ a) * (wr @ (b * r))
        c1 = TWO_PI * (wt @ (a * t)) * (wr @ b)
        d = np.asarray(self.d)

        def func(l):
            l = np.asarray(l, dtype=float)
            n = l[..., 1:] / l[..., :1]
            return c0 + c1 * (n @ d)
        return HomogeneousFn(func, 0)


def spacelike_average_charge(Vminus, test=None, n_t=12, n_r=12, order=6, n_phi=128):
    """1/2 int phi(y) t^b y^a F^as_ab(y) dy, with F^as from V(-inf) by the delta' formula.

    The spacelike tail of B_b = x^a F_ab averaged against phi equals twice the
    charge functional evaluated with eps+ from ``test.epsilon()``.
    """
    test = test if test is not None else SpacelikeTestFunction()
    x, w = _gauss_legendre(n_t)
    ts, wts = test.t_max * x, test.t_max * w
    xr, wr = _gauss_legendre(n_r)
    half = 0.5 * (test.r_hi - test.r_lo)
    rs, wrs = test.r_lo + half * (xr + 1.0), half * wr
    ang = sphere_quadrature(order)
    total = 0.0
    for t, wt in zip(ts, wts):
        for r, w_r in zip(rs, wrs):
            for nv, wa in zip(ang.nodes, ang.weights):
                y = np.concatenate([[t], r * nv])
                phi = test(y)
                if phi == 0.0:
                    continue
                _, F = spacelike_tail_exact(Vminus, y, n_phi)
                B = y @ F
                total += wt * w_r * r * r * wa * phi * B[0]
    return 0.5 * total


# --------------------------------------------------------------------------
# B-field asymptote and Strominger matching


def b_asymptote(profile, step=FD_STEP):
    """W_b(s, l) = L_ba V^a - V_b + s V'_b (covariant), as a callable (s, l)."""
    def W(s, l):
        s = np.asarray(s, dtype=float)
        l = np.asarray(l, dtype=float)
        L = l_tensor(lambda m: profile(s, m), l, step)  # (..., c, a, b): L_ab V^c
        LV = np.einsum("...aba->...b", L)  # L_ba V^a = sum_a L[a][b, a]
        return LV - lower(profile(s, l)) + s[..., None] * lower(profile.vdot(s, l))
    return W


def b_sampler(sampler):
    """x -> B_b(x) = x^a F_ab(x) for a field sampler x -> (A, F)."""
    def sample(x):
        A, F = sampler(x)
        return A, np.asarray(x) @ F
    return sample


def strominger_check(V, V_past, quad=12):
    """Residuals of W(-inf) = W'(+inf), its t-contraction, W(-inf) = l d.V(-inf)
    and d.V(-inf) = d.V'(+inf)."""
    q = resolve_quadrature(quad)
    l = q.null_directions()
    Vm = charged_extension(V.minus, V.charge)
    Vp = charged_extension(V_past.plus, V_past.charge)
    W_minus = _edge_W(Vm, l)
    W_plus = _edge_W(Vp, l)
    div_m = divergence(Vm, l)
    div_p = divergence(Vp, l)
    return {
        "W_matching": float(np.max(np.abs(W_minus - W_plus))),
        "t_contracted": float(np.max(np.abs(W_minus[..., 0] - W_plus[..., 0]))),
        "W_divergence": float(np.max(np.abs(W_minus - div_m[..., None] * lower(l)))),
        "divergence_matching": float(np.max(np.abs(div_m - div_p))),
    }


def _edge_W(Vfn, l):
    L = l_tensor(Vfn, l)
    return np.einsum("...aba->...b", L) - lower(Vfn(l))


# --------------------------------------------------------------------------
# memory


@dataclass(frozen=True)
class TestParticle:
    __test__ = False  # not a pytest class

    charge: float
    mass: float
    velocity: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.velocity, dtype=float)
        object.__setattr__(self, "velocity", v)
        if self.mass <= 0 or v[0] <= 0 or abs(msquare(v) - 1.0) > 1e-9:
            raise OutOfDomainError("test particle needs m > 0 and a unit future timelike velocity")

    @property
    def momentum(self):
        return self.mass * self.velocity


def memory_phase(particle, Vminus, quad=32, p=None):
    """delta(p) = -e/2pi int p.V(-inf)/(p.l) d^2l; ``p`` overrides the particle momentum."""
    charge = particle.charge
    p = particle.momentum if p is None else np.asarray(p, dtype=float)
    if msquare(p) <= 0 or p[0] <= 0:
        raise OutOfDomainError("memory phase needs a future timelike momentum")
    q = resolve_quadrature(quad)
    l = q.null_directions()
    V = np.asarray(Vminus(l))
    return float(-charge / TWO_PI * q.integrate(mdot(p, V) / mdot(p, l)))


def sigma_phase(charge, v, Phi, quad=32):
    """Sigma_Phi(v) = e/4pi int Phi(l)/(v.l)^2 d^2l."""
    v = np.asarray(v, dtype=float)
    q = resolve_quadrature(quad)
    l = q.null_directions()
    return float(charge / FOUR_PI * q.integrate(Phi(l) / mdot(v, l) ** 2))


def memory_kick(particle, data, x0=None, quad=32, s_half=40.0, n_s=2001, rel_step=1e-4):
    """(Delta from the tau integral, Delta from the celestial formula, grad delta).

    The tau integral -e/m int F(x0 + v tau) tau dtau v is carried out under the
    sphere integral: per direction int (s - x0.l) V''(s, l) ds / (v.l)^2.
    All results are covariant vectors.
    """
    v = particle.velocity
    e, m = particle.charge, particle.mass
    x0 = np.zeros(4) if x0 is None else np.asarray(x0, dtype=float)
    q = resolve_quadrature(quad)
    l = q.null_directions()
    vl = mdot(v, l)
    sig = uniform_grid(-s_half, s_half, n_s)
    moments = np.empty((len(l), 4))
    for i, li in enumerate(l):
        s = sig * li[0]
        vdd = data.vddot(s, np.broadcast_to(li, (len(s), 4)))
        moments[i] = SGrid(s, (s - mdot(x0, li))[:, None] * vdd, data.epsilon).integral()
    per_node = wedge(lower(l), lower(moments / vl[:, None] ** 2)) @ v
    delta_time = e / (TWO_PI * m) * q.integrate(per_node)
    Vm = np.asarray(data.minus(l))
    cel = wedge(lower(l), lower(Vm / vl[:, None] ** 2)) @ v
    delta_cel = e / (TWO_PI * m) * q.integrate(cel)
    p = particle.momentum
    grad = np.zeros(4)
    for a in range(4):
        h = rel_step * np.linalg.norm(p)
        dp = np.zeros(4)
        dp[a] = h
        grad[a] = (memory_phase(particle, data.minus, q, p + dp)
                   - memory_phase(particle, data.minus, q, p - dp)) / (2 * h)
    return delta_time, delta_cel, grad


# --------------------------------------------------------------------------
# finite-R integrals


def full_line_integral(data, R, k, quad=32, s_half=40.0, n_s=2001):
    """int F(u t + R k) du over the whole line, done per sphere node."""
    q = resolve_quadrature(quad)
    l = q.null_directions()
    sig = uniform_grid(-s_half, s_half, n_s)
    acc = np.empty((len(l), 4))
    for i, li in enumerate(l):
        U = li[0]
        s = sig * U  # s = u (t.l) + R k.l, integrate in u = (s - R k.l)/(t.l)
        vdd = data.vddot(s, np.broadcast_to(li, (len(s), 4)))
        acc[i] = SGrid(s, vdd, data.epsilon).integral() / U
    return -q.integrate(wedge(lower(l), lower(acc))) / TWO_PI


def half_line_integral(data, R, z, tau0, quad=None, order=32):
    """R int_{tau0}^inf F(tau t + R z) dtau = R/2pi int l^V'(tau0 t.l + R z.l) d^2l/(t.l)."""
    z = np.asarray(z, dtype=float)
    q = resolve_quadrature(quad) if quad is not None else focused_quadrature(z, order)
    l = q.null_directions()
    s = tau0 * l[:, 0] + R * mdot(z, l)
    vals = wedge(lower(l), lower(data.vdot(s, l))) / l[:, 0, None, None]
    return R * q.integrate(vals) / TWO_PI


def half_line_direct(data, R, z, tau0, tau_max=60.0, n_tau=2001, quad=32):
    """Same half-line integral from sampled Kirchhoff fields (test oracle)."""
    z = np.asarray(z, dtype=float)
    taus = uniform_grid(tau0, tau0 + tau_max, n_tau)
    Fs = np.array([kirchhoff_eval(data, tau * T_AXIS + R * z, quad)[1] for tau in taus])
    return R * SGrid(taus, Fs).integral()


def finite_R_integrals(data, k, tau0=-6.0, radii=None, z_spacelike=None, order=32):
    """Report of the full-line and half-line integrals and their R-limits."""
    k = np.asarray(k, dtype=float)
    radii = np.asarray(radii if radii is not None else 2.0 ** np.arange(3, 12), dtype=float)
    report = {"full_line": {float(R): full_line_integral(data, R, k) for R in (1.0, 10.0, 100.0)}}
    vals = np.array([half_line_integral(data, R, k, tau0, order=order) for R in radii])
    lim, err = limit_extrapolate(1.0 / radii, vals)
    expected = -wedge(lower(k), lower(data(np.float64(tau0), k)))
    report["null"] = {"limit": lim, "error": float(np.max(err)), "expected": expected}
    if z_spacelike is not None:
        z = np.asarray(z_spacelike, dtype=float)
        vals = np.array([half_line_integral(data, R, z, tau0, order=order) for R in radii])
        lim, err = limit_extrapolate(1.0 / radii, vals)
        # 1/2pi int (l_b V_a - l_a V_b)(-inf) delta(z.l) d^2l/(t.l)
        expected = _delta_wedge(data.minus, z)
        report["spacelike"] = {"limit": lim, "error": float(np.max(err)), "expected": expected}
    return report


def _delta_wedge(Vminus, z, n_phi=512):
    """1/2pi int (l_b V_a - l_a V_b)(l) delta(z.l) d^2l/(t.l) on the exact circle."""
    def lv(l):
        return -wedge(lower(l), lower(Vminus(l))) / l[..., 0, None, None]
    z = np.asarray(z, dtype=float)
    r = float(np.linalg.norm(z[1:]))
    from .lorentz import rotation_to
    rot = rotation_to(z[1:] / r)
    mu = z[0] / r
    phi = TWO_PI * np.arange(n_phi) / n_phi
    st = np.sqrt(1 - mu * mu)
    n = np.stack([st * np.cos(phi), st * np.sin(phi), np.full(n_phi, mu)], -1) @ rot.T
    l = np.concatenate([np.ones((n_phi, 1)), n], axis=1)
    return lv(l).sum(axis=0) * (TWO_PI / n_phi) / r / TWO_PI


def kick_integral(profile, k, s_half=60.0, n_s=4001):
    """int (k_a V'_b - k_b V'_a)(u, k) du, to compare with k_b V^out_a(-inf) - k_a V^out_b(-inf)."""
    k = np.asarray(k, dtype=float)
    s = uniform_grid(-s_half, s_half, n_s) * k[0]
    vd = profile.vdot(s, np.broadcast_to(k, (len(s), 4)))
    integ = SGrid(s, vd, profile.epsilon).integral()
    return wedge(lower(k), lower(integ))


# --------------------------------------------------------------------------
# soft relation


def soft_relation(event, incoming, quad=8, tol=1e-6):
    """Both sides of the classical soft relation on the directions of ``quad``.

    lhs = 2pi lim w a^out + sum q v/(v.l),  rhs = 2pi lim w a^in + sum q' v'/(v'.l).
    """
    parts = total_asymptotes(event, incoming)
    omega = np.array([0.0])
    f_out = fourier_profile(parts["out"], omega, quad)
    f_in = fourier_profile(parts["in_past"], omega, quad)
    l = f_out.directions
    lhs = -TWO_PI * f_out.at_zero().real + parts["Vj"].plus(l)
    rhs = TWO_PI * f_in.at_zero().real + parts["Vj"].minus(l)
    scale = float(np.max(np.abs(parts["Vj"].plus(l)))) or 1.0
    omega_cls = np.array([0.0, 0.5, 1.0])
    out_cls, _ = ir_classify(fourier_profile(parts["out"], omega_cls, quad), tol, scale)
    in_cls, _ = ir_classify(fourier_profile(parts["in_past"], omega_cls, quad), tol, scale)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "residual": float(np.max(np.abs(lhs - rhs))),
        "out_class": out_cls,
        "in_class": in_cls,
    }


def b_null_limit(sampler, x, l, R0=1.0, levels=12, degree=6):
    """lim R B_b(x + R l) for R -> inf by extrapolation in 1/R; returns (limit, error).

    This limit is W_b(x.l, l) from ``b_asymptote``.
    """
    x = np.asarray(x, dtype=float)
    l = np.asarray(l, dtype=float)
    radii = R0 * 2.0 ** np.arange(levels)
    vals = []
    for R in radii:
        y = x + R * l
        _, F = sampler(y)
        vals.append(R * (y @ F))
    lim, err = limit_extrapolate(1.0 / radii, np.array(vals), degree)
    return lim, float(np.max(err))
