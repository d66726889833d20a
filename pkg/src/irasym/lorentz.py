"""Minkowski-space helpers, signature (+,-,-,-).

Four-vectors are numpy arrays whose last axis has length 4 and holds
contravariant components.  ``mdot`` contracts with the metric.
"""
import numpy as np

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
T_AXIS = np.array([1.0, 0.0, 0.0, 0.0])


def mdot(a, b):
    """Minkowski product along the last axis (broadcasting)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def lower(a):
    """Covariant components of a contravariant vector."""
    a = np.array(a, dtype=np.result_type(a, float), copy=True)
    a[..., 1:] *= -1
    return a


def msquare(a):
    return mdot(a, a)


def null_vectors(n):
    """Null vectors l = (1, n) for unit 3-vectors n (shape (..., 3))."""
    n = np.asarray(n, dtype=float)
    return np.concatenate([np.ones(n.shape[:-1] + (1,)), n], axis=-1)


def four_velocity(beta):
    """Unit timelike four-velocity for 3-velocity ``beta`` (|beta| < 1)."""
    beta = np.asarray(beta, dtype=float)
    b2 = float(beta @ beta)
    if b2 >= 1.0:
        raise ValueError("speed must be below 1")
    gamma = 1.0 / np.sqrt(1.0 - b2)
    return np.concatenate([[gamma], gamma * beta])


def boost_matrix(v):
    """Pure boost taking the time axis t = (1,0,0,0) to the unit timelike vector v."""
    v = np.asarray(v, dtype=float)
    gamma = v[0]
    u = v[1:]
    lam = np.eye(4)
    lam[0, 0] = gamma
    lam[0, 1:] = u
    lam[1:, 0] = u
    lam[1:, 1:] += np.outer(u, u) / (1.0 + gamma)
    return lam


def rotation_to(axis):
    """3x3 rotation matrix whose third column is the unit vector ``axis``."""
    z = np.asarray(axis, dtype=float)
    z = z / np.linalg.norm(z)
    helper = np.array([1.0, 0.0, 0.0]) if abs(z[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    x = helper - (helper @ z) * z
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.column_stack([x, y, z])


def random_four_velocity(rng, max_rapidity=1.0):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    rapidity = rng.uniform(0.0, max_rapidity)
    return np.concatenate([[np.cosh(rapidity)], np.sinh(rapidity) * direction])


def random_lorentz(rng, max_rapidity=1.0):
    """Random proper orthochronous transformation: rotation followed by a boost."""
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    rot = np.eye(4)
    rot[1:, 1:] = q
    return boost_matrix(random_four_velocity(rng, max_rapidity)) @ rot


def levi_civita():
    """Totally antisymmetric symbol with eps[0,1,2,3] = +1 (all indices down)."""
    eps = np.zeros((4, 4, 4, 4))
    from itertools import permutations

    for perm in permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPS = levi_civita()


def wedge(a, b):
    """Antisymmetric tensor a_i b_j - a_j b_i over the last axis (no index moves)."""
    return a[..., :, None] * b[..., None, :] - a[..., None, :] * b[..., :, None]


def dual(F):
    """Hodge dual *F_ab = 1/2 eps_abcd F^cd for a covariant antisymmetric tensor."""
    Fup = np.einsum("ac,bd,...cd->...ab", ETA, ETA, F)
    return 0.5 * np.einsum("abcd,...cd->...ab", EPS, Fup)
