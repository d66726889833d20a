"""Scattering currents and their null profiles V(s, l).

Profiles are functions of (s, l) with s = x.l, homogeneous of degree -1 in
(s, l) jointly.  Every evaluator accepts unscaled l; the switch functions
depend on s/(t.l) so homogeneity is built in.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import erf

from .celestial import HomogeneousFn
from .errors import InconsistentEventError
from .lorentz import mdot

S_STEP = 1e-4


def _combine(f, g, op):
    if f is None or g is None:
        return None
    return lambda *args: op(f(*args), g(*args))


def _scaled(f, c):
    if f is None:
        return None
    return lambda *args: c * f(*args)


@dataclass(frozen=True)
class AsymptoteProfile:
    """Null profile V(s, l) with optional analytic s-derivatives and limits.

    ``minus`` and ``plus`` are the limits V(-inf, l), V(+inf, l) as functions of l.
    ``epsilon`` is the decay exponent of |V'(s)| ~ |s|^(-1-eps) (inf for
    Gaussian or compact decay).
    """

    func: Callable
    charge: float = 0.0
    epsilon: float = np.inf
    dot: Optional[Callable] = None
    ddot: Optional[Callable] = None
    minus: Optional[Callable] = None
    plus: Optional[Callable] = None

    def __call__(self, s, l):
        return self.func(np.asarray(s, dtype=float), np.asarray(l, dtype=float))

    def vdot(self, s, l):
        s = np.asarray(s, dtype=float)
        l = np.asarray(l, dtype=float)
        if self.dot is not None:
            return self.dot(s, l)
        h = S_STEP * l[..., 0]
        hh = h[..., None]
        return (self.func(s - 2 * h, l) - 8 * self.func(s - h, l) + 8 * self.func(s + h, l)
                - self.func(s + 2 * h, l)) / (12 * hh)

    def vddot(self, s, l):
        s = np.asarray(s, dtype=float)
        l = np.asarray(l, dtype=float)
        if self.ddot is not None:
            return self.ddot(s, l)
        h = S_STEP * l[..., 0]
        hh = h[..., None]
        return (self.vdot(s + h, l) - self.vdot(s - h, l)) / (2 * hh)

    def limit(self, sign):
        """V(+-inf, .) as a degree -1 HomogeneousFn."""
        f = self.plus if sign > 0 else self.minus
        if f is None:
            raise ValueError("profile has no declared limit at this end")
        return HomogeneousFn(f, -1, (4,))

    def _binary(self, other, op):
        return AsymptoteProfile(
            func=_combine(self.func, other.func, op),
            charge=op(self.charge, other.charge),
            epsilon=min(self.epsilon, other.epsilon),
            dot=_combine(self.dot, other.dot, op),
            ddot=_combine(self.ddot, other.ddot, op),
            minus=_combine(self.minus, other.minus, op),
            plus=_combine(self.plus, other.plus, op),
        )

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        c = float(c)
        return AsymptoteProfile(_scaled(self.func, c), c * self.charge, self.epsilon,
                                _scaled(self.dot, c), _scaled(self.ddot, c),
                                _scaled(self.minus, c), _scaled(self.plus, c))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    @classmethod
    def static(cls, V, charge=0.0):
        """s-independent profile V(s, l) = V(l)."""
        def func(s, l):
            return np.broadcast_to(V(l), np.broadcast_shapes(np.shape(s), np.shape(l)[:-1]) + (4,))

        def zero(s, l):
            return np.zeros(np.broadcast_shapes(np.shape(s), np.shape(l)[:-1]) + (4,))

        return cls(func, charge, np.inf, zero, zero, V, V)

    def gauge_shift(self, alpha):
        """V + l alpha(s, l); alpha is a callable (s, l) -> scalar of degree 0."""
        f = self.func

        def func(s, l):
            return f(s, l) + np.asarray(alpha(s, l))[..., None] * l
        return AsymptoteProfile(func, self.charge, self.epsilon)


@dataclass(frozen=True)
class PointParticle:
    charge: float
    velocity: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.velocity, dtype=float)
        object.__setattr__(self, "velocity", v)
        if v.shape != (4,) or v[0] <= 0 or abs(mdot(v, v) - 1.0) > 1e-9:
            raise InconsistentEventError("four-velocity must satisfy v.v = 1, v0 > 0")

    def coulomb(self, l):
        """q v / (v.l)."""
        l = np.asarray(l, dtype=float)
        return self.charge * self.velocity / mdot(self.velocity, l)[..., None]


def _coulomb_sum(particles):
    def V(l):
        l = np.asarray(l, dtype=float)
        out = np.zeros(l.shape)
        for p in particles:
            out = out + p.coulomb(l)
        return out
    return V


@dataclass(frozen=True)
class ScatteringEvent:
    """Incoming and outgoing charges joined by a smooth switch chi(s/(t.l))."""

    incoming: tuple
    outgoing: tuple
    width: float = 1.0
    center: float = 0.0
    charge_tol: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "incoming", tuple(self.incoming))
        object.__setattr__(self, "outgoing", tuple(self.outgoing))
        if self.width <= 0:
            raise InconsistentEventError("transition width must be positive")
        if abs(self.charge_in - self.charge_out) > self.charge_tol:
            raise InconsistentEventError(
                f"charge not conserved: {self.charge_in} in, {self.charge_out} out")

    @property
    def charge_in(self):
        return float(sum(p.charge for p in self.incoming))

    @property
    def charge_out(self):
        return float(sum(p.charge for p in self.outgoing))

    def switch(self, s, l):
        """chi and d chi / ds."""
        tl = np.asarray(l)[..., 0]
        z = (s / tl - self.center) / self.width
        chi = 0.5 * (1.0 + erf(z))
        dchi = np.exp(-z * z) / (np.sqrt(np.pi) * self.width * tl)
        return chi, dchi

    def is_trivial(self):
        def key(ps):
            return sorted((p.charge, tuple(np.round(p.velocity, 12))) for p in ps)
        return key(self.incoming) == key(self.outgoing)


def current_profile(event):
    """V^j(s, l) = (1 - chi) sum q' v'/(v'.l) + chi sum q v/(v.l)."""
    vin = _coulomb_sum(event.incoming)
    vout = _coulomb_sum(event.outgoing)

    def func(s, l):
        chi, _ = event.switch(s, l)
        a, b = vin(l), vout(l)
        return a + chi[..., None] * (b - a)

    def dot(s, l):
        _, dchi = event.switch(s, l)
        return dchi[..., None] * (vout(l) - vin(l))

    def ddot(s, l):
        tl = np.asarray(l)[..., 0]
        z = (s / tl - event.center) / event.width
        _, dchi = event.switch(s, l)
        d2 = -2.0 * z * dchi / (event.width * tl)
        return d2[..., None] * (vout(l) - vin(l))

    return AsymptoteProfile(func, event.charge_out, np.inf, dot, ddot, vin, vout)


def ret_adv_rad_asymptotes(event):
    """The six null asymptotes of the retarded, advanced and radiation fields of ``event``."""
    Vj = current_profile(event)
    at_minus = AsymptoteProfile.static(Vj.minus, Vj.charge)
    at_plus = AsymptoteProfile.static(Vj.plus, Vj.charge)
    return {
        "ret": Vj,
        "ret_past": at_minus,
        "adv": at_plus,
        "adv_past": Vj,
        "rad": Vj - at_plus,
        "rad_past": at_minus - Vj,
    }
