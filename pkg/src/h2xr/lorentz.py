"""Minkowski space R^3_1 with metric dx1^2 + dx2^2 - dx3^2.

Vectors are plain numpy arrays whose last axis has length 3, so every
function here broadcasts over leading axes.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonSpacelikeSpeed

DEFAULT_TOL = 1e-9

ETA3 = np.array([1.0, 1.0, -1.0])


def lvec(x1, x2, x3):
    """Build a finite vector of R^3_1."""
    v = np.array([x1, x2, x3], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite Lorentz vector {v!r}")
    return v


def inner3(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def cross_l(u, v):
    """Lorentzian cross product (u2v3-u3v2, u3v1-u1v3, u2v1-u1v2).

    This is the Euclidean cross product with its third component negated,
    so the result is Lorentz-orthogonal to both factors.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u1, u2, u3 = u[..., 0], u[..., 1], u[..., 2]
    v1, v2, v3 = v[..., 0], v[..., 1], v[..., 2]
    return np.stack([u2 * v3 - u3 * v2, u3 * v1 - u1 * v3, u2 * v1 - u1 * v2], axis=-1)


class Causal(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


@dataclass(frozen=True)
class CausalCharacter:
    kind: Causal
    norm2: float
    tol: float


def causal_character(u, tol=DEFAULT_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = float(inner3(u, u))
    if q > tol:
        kind = Causal.SPACELIKE
    elif q < -tol:
        kind = Causal.TIMELIKE
    else:
        kind = Causal.LIGHTLIKE
    return CausalCharacter(kind, q, tol)


def in_h2(p, tol=DEFAULT_TOL):
    """Upper sheet of the two-sheeted hyperboloid <p,p> = -1, x3 > 0."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = np.asarray(p, dtype=float)
    return bool(abs(inner3(p, p) + 1.0) <= tol and p[2] > 0)


def in_desitter(u, tol=DEFAULT_TOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(abs(inner3(u, u) - 1.0) <= tol)


def curve_normal(f, df, tol=DEFAULT_TOL):
    """Unit normal N_f = (f x df)/sqrt(<df,df>) of a spacelike curve in H^2.

    Only the + orientation is returned; the opposite sign yields a congruent
    surface.
    """
    f = np.asarray(f, dtype=float)
    df = np.asarray(df, dtype=float)
    speed2 = inner3(df, df)
    if np.any(speed2 <= tol):
        raise NonSpacelikeSpeed(f"<f',f'> = {np.min(speed2):.3g} is not spacelike")
    return cross_l(f, df) / np.sqrt(speed2)[..., None]
