"""Shared numerical substrate: sphere quadratures, limits, mollifiers, s-integrals.

The celestial sphere is always parametrized by unit 3-vectors ``n`` in a chosen
rest frame (default the time axis t), so that null directions are l = (1, n)
with t.l = 1.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import math

import mpmath
import numpy as np
from scipy.integrate import simpson

from .errors import (
    InvalidGridError,
    InvalidOrderError,
    InvalidSequenceError,
    InvalidWidthError,
)
from .lorentz import null_vectors, rotation_to

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes and positive weights for the solid-angle measure on S^2."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    frame: np.ndarray = field(default=None, repr=False)

    def null_directions(self):
        """Null vectors scaled to frame-time 1 (t.l = 1 in the default frame)."""
        l = null_vectors(self.nodes)
        if self.frame is not None:
            l = l @ self.frame.T
        return l

    def integrate(self, values):
        """Weighted sum over the node axis (axis 0)."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))

    def __len__(self):
        return len(self.weights)

    def in_frame(self, lam):
        """Same rule expressed in the frame obtained by the Lorentz map ``lam``."""
        frame = lam if self.frame is None else lam @ self.frame
        return SphereQuadrature(self.nodes, self.weights, self.order, frame)


@lru_cache(maxsize=64)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _product_rule(mu, mu_weights, n_phi, axis=None, order=None):
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_theta = np.sqrt(np.clip(1.0 - mu**2, 0.0, None))
    nodes = np.stack(
        [
            np.outer(sin_theta, np.cos(phi)),
            np.outer(sin_theta, np.sin(phi)),
            np.outer(mu, np.ones_like(phi)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.outer(mu_weights, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    if axis is not None:
        nodes = nodes @ rotation_to(axis).T
    return SphereQuadrature(nodes, weights, order)


def sphere_quadrature(order, axis=None):
    """Gauss-Legendre in cos(theta) times uniform phi.

    ``order`` Legendre nodes and ``2*order`` azimuthal nodes; exact for spherical
    harmonics of degree <= 2*order - 1.  ``axis`` rotates the polar axis.
    """
    if int(order) != order or order < 2:
        raise InvalidOrderError(f"quadrature order must be an integer >= 2, got {order!r}")
    order = int(order)
    mu, w = _gauss_legendre(order)
    return _product_rule(mu, w, 2 * order, axis, order)


def _graded_breakpoints(focus, inner, ratio):
    """Breakpoints in [-1, 1] refined geometrically towards ``focus``."""
    points = {-1.0, 1.0, focus}
    for side in (+1.0, -1.0):
        length = (1.0 - focus) if side > 0 else (focus + 1.0)
        if length <= 0.0:
            continue
        d = min(inner, length)
        while d < length:
            points.add(focus + side * d)
            d /= ratio
    return np.array(sorted(points))


def graded_sphere_quadrature(order, axis=(0.0, 0.0, 1.0), focus=1.0, inner=1e-9,
                             ratio=0.5, panel_order=10):
    """Product rule whose cos(theta) panels are graded towards ``cos(theta) = focus``.

    Panels shrink geometrically (factor ``ratio``) down to width ``inner`` on both
    sides of the focus; their breakpoints are mirror images near the focus, so a
    principal-value kernel 1/(mu - focus) is integrated symmetrically and a jump
    at the focus falls on a panel edge.
    """
    if int(order) != order or order < 2:
        raise InvalidOrderError(f"quadrature order must be an integer >= 2, got {order!r}")
    focus = float(np.clip(focus, -1.0, 1.0))
    x, w = _gauss_legendre(panel_order)
    edges = _graded_breakpoints(focus, inner, ratio)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mu = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    mu_w = half[:, None] * w[None, :]
    return _product_rule(mu.ravel(), mu_w.ravel(), 2 * int(order), axis, int(order))


def focused_quadrature(y, order, **kwargs):
    """Graded rule adapted to the hypersurface y.l = 0 (or to the minimum of |y.l|).

    With l = (1, n), y.l = y0 - |y_vec| cos(angle(n, y_vec)); the rule concentrates
    nodes where this vanishes (spacelike y) or is smallest (timelike y).
    """
    y = np.asarray(y, dtype=float)
    r = float(np.linalg.norm(y[1:]))
    if r < 1e-300:
        return sphere_quadrature(order)
    return graded_sphere_quadrature(order, axis=y[1:] / r, focus=y[0] / r, **kwargs)


def adaptive(order, **kwargs):
    """Quadrature policy: a callable x -> focused rule for x."""

    def policy(x):
        return focused_quadrature(x, order, **kwargs)

    policy.order = order
    return policy


def resolve_quadrature(quad, x=None):
    """Accept either a fixed SphereQuadrature or a policy callable."""
    if isinstance(quad, SphereQuadrature):
        return quad
    if callable(quad):
        return quad(x)
    if isinstance(quad, (int, np.integer)):
        return sphere_quadrature(int(quad))
    raise TypeError(f"not a quadrature: {quad!r}")


def limit_extrapolate(h, y, degree=None):
    """Richardson (Neville) extrapolation of samples y(h_i) to h = 0.

    ``h`` must be positive and strictly decreasing.  The polynomial model uses
    the last ``degree + 1`` samples (default: all, capped at 6).  Returns
    ``(limit, error)`` where the error is the size of the last correction.
    ``y`` may carry trailing dimensions.
    """
    h = np.asarray(h, dtype=float)
    y = np.asarray(y)
    if h.ndim != 1 or len(h) < 3 or len(y) != len(h):
        raise InvalidSequenceError("need at least 3 samples (h_i, y_i)")
    if np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise InvalidSequenceError("h_i must be positive and strictly decreasing towards 0")
    if degree is None:
        degree = min(len(h) - 1, 6)
    degree = int(min(degree, len(h) - 1))
    h = h[-(degree + 1):]
    table = [np.asarray(v, dtype=np.result_type(y, float)) for v in y[-(degree + 1):]]
    previous_top = top = table[-1]
    for k in range(1, degree + 1):
        for i in range(degree, k - 1, -1):
            table[i] = (h[i - k] * table[i] - h[i] * table[i - 1]) / (h[i - k] - h[i])
        previous_top, top = top, table[degree]
    error = np.abs(top - previous_top)
    return top, error


@dataclass(frozen=True)
class Mollifier:
    """Gaussian regularization of delta (kind='delta') or delta' (kind='delta_prime')."""

    kind: str
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidWidthError(f"mollifier width must be positive, got {self.width!r}")
        if self.kind not in ("delta", "delta_prime"):
            raise ValueError(f"unknown mollifier kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        h = self.width
        g = np.exp(-0.5 * (x / h) ** 2) / (h * math.sqrt(2.0 * math.pi))
        if self.kind == "delta":
            return g
        return -x / h**2 * g


def mollified_pair(kind, width, argument):
    return Mollifier(kind, width)(argument)


def uniform_grid(lo, hi, n):
    """Odd-length uniform grid suitable for Simpson/Filon panels."""
    n = int(n) | 1
    return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class SGrid:
    """Samples of a function of s with a declared power-law decay of its tails.

    ``epsilon`` is the decay exponent in |f(s)| ~ C |s|^(-1-epsilon); ``inf``
    means faster than any power (no tail correction).
    """

    samples: np.ndarray
    values: np.ndarray
    epsilon: float = math.inf

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or np.any(np.diff(s) <= 0):
            raise InvalidGridError("s samples must be strictly increasing")
        if len(self.values) != len(s):
            raise InvalidGridError("values must match samples along axis 0")

    def tail_coefficients(self):
        """Least-squares C for each tail, fitted on the outer 10% of samples."""
        s = np.asarray(self.samples)
        v = np.asarray(self.values)
        k = max(3, len(s) // 10)
        p = 1.0 + self.epsilon
        out = []
        for sl in (slice(0, k), slice(len(s) - k, len(s))):
            basis = np.abs(s[sl]) ** (-p)
            coeff = np.tensordot(basis, v[sl], axes=(0, 0)) / (basis @ basis)
            out.append(coeff)
        return out[0], out[1]

    def integral(self):
        s = np.asarray(self.samples)
        v = np.asarray(self.values)
        total = simpson(v, x=s, axis=0)
        if math.isfinite(self.epsilon):
            if s[0] >= 0 or s[-1] <= 0:
                raise InvalidGridError("tail model needs a grid straddling s = 0")
            c_left, c_right = self.tail_coefficients()
            eps = self.epsilon
            total = total + c_left * abs(s[0]) ** (-eps) / eps + c_right * s[-1] ** (-eps) / eps
        return total


def _filon_coefficients(theta):
    theta = np.asarray(theta, dtype=float)
    small = np.abs(theta) < 0.1
    t = np.where(small, 0.1, theta)
    s, c = np.sin(t), np.cos(t)
    alpha = (t**2 + t * s * c - 2.0 * s**2) / t**3
    beta = 2.0 * (t * (1.0 + c**2) - 2.0 * s * c) / t**3
    gamma = 4.0 * (s - t * c) / t**3
    th = theta
    alpha_s = 2 * th**3 / 45 - 2 * th**5 / 315 + 2 * th**7 / 4725
    beta_s = 2 / 3 + 2 * th**2 / 15 - 4 * th**4 / 105 + 2 * th**6 / 567
    gamma_s = 4 / 3 - 2 * th**2 / 15 + th**4 / 210 - th**6 / 11340
    return (
        np.where(small, alpha_s, alpha),
        np.where(small, beta_s, beta),
        np.where(small, gamma_s, gamma),
    )


def filon_fourier(s, f, omega):
    """Filon-Simpson rule for the integral of f(s) exp(i omega s) over the grid.

    ``s`` uniform with an odd number of points; ``f`` has the s axis first and
    any trailing shape; ``omega`` is a 1-D array.  Returns shape
    ``(len(omega),) + f.shape[1:]``.
    """
    s = np.asarray(s, dtype=float)
    f = np.asarray(f, dtype=float)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    n = len(s)
    if n < 3 or n % 2 == 0:
        raise InvalidGridError("Filon rule needs an odd number (>= 3) of samples")
    h = (s[-1] - s[0]) / (n - 1)
    if not np.allclose(np.diff(s), h, rtol=1e-9, atol=1e-12):
        raise InvalidGridError("Filon rule needs a uniform grid")
    alpha, beta, gamma = _filon_coefficients(omega * h)
    phase = np.exp(1j * np.outer(omega, s))  # (n_omega, n)
    fr = f.reshape(n, -1)
    even_w = np.zeros(n)
    even_w[0::2] = 1.0
    even_w[0] = even_w[-1] = 0.5
    odd_w = np.zeros(n)
    odd_w[1::2] = 1.0
    c_even = (phase * even_w) @ fr
    c_odd = (phase * odd_w) @ fr
    # boundary term: alpha * [f e^{i w s}/i]_{s0}^{sN}
    boundary = -1j * (np.outer(phase[:, -1], fr[-1]) - np.outer(phase[:, 0], fr[0]))
    out = h * (alpha[:, None] * boundary + beta[:, None] * c_even + gamma[:, None] * c_odd)
    return out.reshape((len(omega),) + f.shape[1:])


def power_tail_fourier(coeff, edge, epsilon, omega, side):
    """Integral of coeff*|s|^(-1-eps) e^{i omega s} beyond ``edge``.

    ``side = +1`` integrates (edge, inf), ``side = -1`` integrates (-inf, edge).
    """
    a = abs(edge)
    p = 1.0 + epsilon
    out = []
    for w in np.atleast_1d(omega):
        if w == 0.0:
            val = a ** (1 - p) / (p - 1)
        else:
            z = -1j * w * a if side > 0 else 1j * w * a
            val = complex(a ** (1 - p) * mpmath.expint(p, z))
        out.append(val)
    out = np.array(out)
    return out.reshape((-1,) + (1,) * np.ndim(coeff)) * np.asarray(coeff)
