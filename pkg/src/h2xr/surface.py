"""Pointwise differential geometry of a surface patch in H^2 x R inside R^3_1 x R.

Every routine is vectorised: ``x`` and ``y`` may be arrays of any (equal)
shape and 4-vectors carry a trailing axis of length 4. The ambient metric of
R^3_1 x R is diag(1, 1, -1, 1).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegeneratePoint
from .numerics import diff1, diff2, richardson

ETA4 = np.array([1.0, 1.0, -1.0, 1.0])
E4 = np.array([0.0, 0.0, 0.0, 1.0])

FIRST_STEP = 1e-3
SECOND_STEP = 1e-2
INDETERMINATE_SIN = 1e-6


def inner4(u, v):
    return np.sum(np.asarray(u) * np.asarray(v) * ETA4, axis=-1)


@dataclass(frozen=True, eq=False)
class Immersion:
    """A parametrised patch (x, y) -> R^3_1 x R over a rectangle.

    ``func``, ``fx`` and ``fy`` take broadcastable arrays and return arrays
    with a trailing axis of length 4; the first three components are the
    H^2 part and the last one is the height t.
    """

    func: object
    domain: tuple
    fx: object = None
    fy: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x0, x1, y0, y1 = (float(v) for v in self.domain)
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"empty domain {self.domain}")
        object.__setattr__(self, "domain", (x0, x1, y0, y1))

    def __call__(self, x, y):
        x, y = _xy(x, y)
        return np.asarray(self.func(x, y), dtype=float)

    @property
    def has_partials(self):
        return self.fx is not None and self.fy is not None

    @property
    def name(self):
        return self.meta.get("family", "immersion")

    @cached_property
    def orientation(self):
        """+1 or -1, chosen so the unit normal has a non-negative t-component
        at the centre of the domain. The raw normal is a continuous function
        of the partials, so one global sign keeps the field continuous."""
        x0, x1, y0, y1 = self.domain
        n = _raw_normal(self, np.array(0.5 * (x0 + x1)), np.array(0.5 * (y0 + y1)))
        return 1.0 if n[3] >= -1e-12 * np.sqrt(abs(inner4(n, n))) else -1.0


def _xy(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.broadcast_arrays(x, y)


def derivative(fn, x, y, axis, h=FIRST_STEP, domain=None, order=1, extrapolate=False):
    """Fourth-order central derivative of a field ``fn(x, y)`` along one axis.

    ``domain`` is (x0, x1, y0, y1); stencils leaving it raise DomainClip.
    With ``extrapolate`` one Richardson step (h, h/2) is applied.
    """
    rule = diff1 if order == 1 else diff2
    if axis == 0:
        f = lambda s: fn(s, y)
        at, span = x, None if domain is None else domain[:2]
    else:
        f = lambda s: fn(x, s)
        at, span = y, None if domain is None else domain[2:]
    if extrapolate:
        return richardson(rule, f, at, h, span)
    return rule(f, at, h, span)


def partials(imm, x, y, h=FIRST_STEP):
    """(F_x, F_y): analytic when the immersion provides them, else finite differences."""
    x, y = _xy(x, y)
    if imm.has_partials:
        return (np.asarray(imm.fx(x, y), dtype=float), np.asarray(imm.fy(x, y), dtype=float))
    return (derivative(imm, x, y, 0, h, imm.domain), derivative(imm, x, y, 1, h, imm.domain))


def metric_from(fx, fy):
    """Induced metric coefficients (E, F, G) and the Gram matrix."""
    E = inner4(fx, fx)
    F = inner4(fx, fy)
    G = inner4(fy, fy)
    g = np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)
    return E, F, G, g


def metric(imm, x, y, h=FIRST_STEP):
    fx, fy = partials(imm, x, y, h)
    E, F, G, _ = metric_from(fx, fy)
    return np.stack([E, F, G], axis=-1)


def tangent_coords(g, fx, fy, v):
    """Coordinates (a, b) of the tangential projection a F_x + b F_y of ``v``."""
    rhs = np.stack([inner4(v, fx), inner4(v, fy)], axis=-1)
    return np.linalg.solve(g, rhs[..., None])[..., 0]


def _orthogonal_complement(u, v, w):
    """Vector Lorentz-orthogonal to u, v, w in R^3_1 x R (cofactor expansion)."""
    shape = np.broadcast_shapes(u.shape, v.shape, w.shape)
    rows = np.stack([np.broadcast_to(u, shape), np.broadcast_to(v, shape), np.broadcast_to(w, shape)], axis=-2)
    comps = []
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        comps.append((-1) ** i * np.linalg.det(rows[..., cols]))
    # Euclidean cofactor vector c satisfies c . z = 0; eta turns it into <n, z> = 0
    return np.stack(comps, axis=-1) * ETA4


def _raw_normal(imm, x, y, h=FIRST_STEP):
    p = imm(x, y)
    xt = p * np.array([1.0, 1.0, 1.0, 0.0])
    fx, fy = partials(imm, x, y, h)
    return _orthogonal_complement(fx, fy, xt)


def normals(imm, x, y, h=FIRST_STEP):
    """(xi_tilde, xi): the normal of H^2 x R and the unit normal of the surface."""
    x, y = _xy(x, y)
    p = imm(x, y)
    xt = p * np.array([1.0, 1.0, 1.0, 0.0])
    fx, fy = partials(imm, x, y, h)
    n = _orthogonal_complement(fx, fy, xt)
    q = inner4(n, n)
    scale = np.sqrt(np.abs(inner4(fx, fx) * inner4(fy, fy) * inner4(xt, xt))) + 1e-300
    if np.any(q <= 1e-24 * scale ** 2):
        raise DegeneratePoint("tangent plane and H^2 normal are linearly dependent")
    return xt, imm.orientation * n / np.sqrt(q)[..., None]


def angle_and_T(xi):
    """Angle function theta in [0, pi] and T = dt - cos(theta) xi."""
    xi = np.asarray(xi, dtype=float)
    h = xi[..., :3]
    s2 = h[..., 0] ** 2 + h[..., 1] ** 2 - h[..., 2] ** 2
    theta = np.arctan2(np.sqrt(np.maximum(s2, 0.0)), xi[..., 3])
    T = E4 - xi[..., 3:4] * xi
    return theta, T


def _xi_field(imm, h):
    return lambda x, y: normals(imm, x, y, h)[1]


def shape_operator(imm, x, y, h=FIRST_STEP):
    """Weingarten map in the coordinate basis {d_x, d_y}.

    Column j holds A d_j = -(tangential part of d_j xi); the flat derivative
    of xi is taken by finite differences of the normal field.
    """
    x, y = _xy(x, y)
    fx, fy = partials(imm, x, y, h)
    _, _, _, g = metric_from(fx, fy)
    xi_f = _xi_field(imm, h)
    dxi = [derivative(xi_f, x, y, axis, h, imm.domain) for axis in (0, 1)]
    # second fundamental form II_kj = <f_kj, xi> = -<d_j xi, f_k>
    II = -np.stack([np.stack([inner4(dxi[j], f) for j in (0, 1)], -1) for f in (fx, fy)], -2)
    return np.linalg.solve(g, II)


@dataclass
class GeometrySample:
    x: np.ndarray
    y: np.ndarray
    point: np.ndarray
    f_x: np.ndarray
    f_y: np.ndarray
    metric: np.ndarray  # (..., 3) = E, F, G
    xi_tilde: np.ndarray
    xi: np.ndarray
    theta: np.ndarray
    T: np.ndarray
    shape: np.ndarray
    k1: np.ndarray = None
    k2: np.ndarray = None
    K: np.ndarray = None
    Hmean: np.ndarray = None
    indeterminate: np.ndarray = None

    @property
    def gram(self):
        E, F, G = self.metric[..., 0], self.metric[..., 1], self.metric[..., 2]
        return np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)


def sample(imm, x, y, h=FIRST_STEP):
    """All pointwise data at (x, y), curvatures included."""
    x, y = _xy(x, y)
    p = imm(x, y)
    fx, fy = partials(imm, x, y, h)
    E, F, G, _ = metric_from(fx, fy)
    xt, xi = normals(imm, x, y, h)
    theta, T = angle_and_T(xi)
    s = GeometrySample(x, y, p, fx, fy, np.stack([E, F, G], -1), xt, xi, theta, T,
                       shape_operator(imm, x, y, h))
    s.k1, s.k2, s.K, s.Hmean = curvatures(s)
    s.indeterminate = np.sin(theta) <= INDETERMINATE_SIN
    return s


def _eigvec(A, lam):
    a = np.stack([A[..., 0, 1], lam - A[..., 0, 0]], -1)
    b = np.stack([lam - A[..., 1, 1], A[..., 1, 0]], -1)
    pick = (np.linalg.norm(a, axis=-1) >= np.linalg.norm(b, axis=-1))[..., None]
    return np.where(pick, a, b)


def curvatures(s):
    """(k1, k2, K, Hmean) from a sample.

    k1 is the principal curvature whose direction is closest to T; both are
    NaN where sin(theta) is too small for T to single out a direction.
    K = det A - cos^2 theta and Hmean = tr A / 2.
    """
    g = s.gram
    II = g @ s.shape
    II = 0.5 * (II + np.swapaxes(II, -1, -2))
    A = np.linalg.solve(g, II)
    tr = A[..., 0, 0] + A[..., 1, 1]
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    disc = np.sqrt(np.maximum(0.25 * tr * tr - det, 0.0))
    lam_p, lam_m = 0.5 * tr + disc, 0.5 * tr - disc
    b = np.stack([inner4(s.T, s.f_x), inner4(s.T, s.f_y)], -1)

    def alignment(v):
        vg = np.sqrt(np.abs(np.einsum("...i,...ij,...j", v, g, v))) + 1e-300
        return np.abs(np.sum(v * b, -1)) / vg

    first_p = alignment(_eigvec(A, lam_p)) >= alignment(_eigvec(A, lam_m))
    k1 = np.where(first_p, lam_p, lam_m)
    k2 = np.where(first_p, lam_m, lam_p)
    bad = np.sin(s.theta) <= INDETERMINATE_SIN
    k1 = np.where(bad, np.nan, k1)
    k2 = np.where(bad, np.nan, k2)
    K = det - s.xi[..., 3] ** 2
    return k1, k2, K, 0.5 * tr


def brioschi(metric_fn, x, y, h=SECOND_STEP, domain=None):
    """Intrinsic Gaussian curvature of E dx^2 + 2F dx dy + G dy^2.

    ``metric_fn(x, y)`` returns (..., 3) = (E, F, G); derivatives are
    fourth-order differences with one Richardson step.
    """
    x, y = _xy(x, y)
    m = metric_fn(x, y)
    d = lambda fn, axis, order=1: derivative(fn, x, y, axis, h, domain, order, extrapolate=True)
    mx = d(metric_fn, 0)
    my = d(metric_fn, 1)
    mxx = d(metric_fn, 0, 2)
    myy = d(metric_fn, 1, 2)
    mxy = d(lambda u, v: derivative(metric_fn, u, v, 1, h, domain, 1, extrapolate=True), 0)
    E, F, G = m[..., 0], m[..., 1], m[..., 2]
    Ex, Fx, Gx = mx[..., 0], mx[..., 1], mx[..., 2]
    Ey, Fy, Gy = my[..., 0], my[..., 1], my[..., 2]
    Eyy, Gxx, Fxy = myy[..., 0], mxx[..., 2], mxy[..., 1]
    M1 = np.stack([
        np.stack([-0.5 * Eyy + Fxy - 0.5 * Gxx, 0.5 * Ex, Fx - 0.5 * Ey], -1),
        np.stack([Fy - 0.5 * Gx, E, F], -1),
        np.stack([0.5 * Gy, F, G], -1),
    ], -2)
    zero = np.zeros_like(E)
    M2 = np.stack([
        np.stack([zero, 0.5 * Ey, 0.5 * Gx], -1),
        np.stack([0.5 * Ey, E, F], -1),
        np.stack([0.5 * Gx, F, G], -1),
    ], -2)
    return (np.linalg.det(M1) - np.linalg.det(M2)) / (E * G - F * F) ** 2


def gauss_intrinsic(imm, x, y, h=SECOND_STEP):
    return brioschi(lambda u, v: metric(imm, u, v), x, y, h, imm.domain)


def _omega(imm, h):
    """Normal connection form: D_X xi = omega(X) xi_tilde, omega(X) = <xi, d_X xi_tilde>."""
    def field(x, y):
        fx, fy = partials(imm, x, y, h)
        _, xi = normals(imm, x, y, h)
        mask = np.array([1.0, 1.0, 1.0, 0.0])
        return np.stack([inner4(xi, fx * mask), inner4(xi, fy * mask)], -1)
    return field


def normal_curvature(imm, x, y, h=FIRST_STEP):
    """R_perp(d_x, d_y) xi as a 4-vector.

    With D_X xi = omega(X) xi_tilde and D_X xi_tilde = omega(X) xi the
    curvature is d omega(d_x, d_y) xi_tilde.
    """
    x, y = _xy(x, y)
    w = _omega(imm, h)
    dw = derivative(w, x, y, 0, h, imm.domain)[..., 1] - derivative(w, x, y, 1, h, imm.domain)[..., 0]
    xt, _ = normals(imm, x, y, h)
    return dw[..., None] * xt


def normal_norm(v, xi, xi_tilde):
    """Euclidean length of the coefficients of ``v`` in the frame (xi, xi_tilde)."""
    a = inner4(v, xi)
    b = -inner4(v, xi_tilde)
    return np.hypot(a, b)


def theta_field(imm, h=FIRST_STEP):
    return lambda x, y: angle_and_T(normals(imm, x, y, h)[1])[0]


def normal_curvature_expected(imm, x, y, h=FIRST_STEP):
    """sin(theta) (theta_x t_y - theta_y t_x) xi_tilde, i.e. sin(theta) d theta ^ dt.

    In coordinates where t = x this is -sin(theta) theta_y xi_tilde.
    """
    x, y = _xy(x, y)
    th = theta_field(imm, h)
    tx = derivative(th, x, y, 0, h, imm.domain)
    ty = derivative(th, x, y, 1, h, imm.domain)
    fx, fy = partials(imm, x, y, h)
    xt, xi = normals(imm, x, y, h)
    theta, _ = angle_and_T(xi)
    coef = np.sin(theta) * (tx * fy[..., 3] - ty * fx[..., 3])
    return coef[..., None] * xt


def structure_residuals(imm, x, y, h=FIRST_STEP):
    """Residuals of nabla_X T = cos(theta) A X and X(cos theta) = -g(AX, T).

    Returns arrays of shape (..., 2) (one column per X in {d_x, d_y}); the
    first is measured in the induced metric.
    """
    x, y = _xy(x, y)
    s = sample(imm, x, y, h)
    g = s.gram
    T_f = lambda u, v: angle_and_T(normals(imm, u, v, h)[1])[1]
    c_f = lambda u, v: normals(imm, u, v, h)[1][..., 3]
    cos = s.xi[..., 3]
    b = np.stack([inner4(s.T, s.f_x), inner4(s.T, s.f_y)], -1)
    res_T, res_cos = [], []
    for axis in (0, 1):
        dT = derivative(T_f, x, y, axis, h, imm.domain)
        nabla = tangent_coords(g, s.f_x, s.f_y, dT)
        AX = s.shape[..., :, axis]
        r = nabla - cos[..., None] * AX
        res_T.append(np.sqrt(np.abs(np.einsum("...i,...ij,...j", r, g, r))))
        dc = derivative(c_f, x, y, axis, h, imm.domain)
        res_cos.append(np.abs(dc + np.sum(AX * b, -1)))
    return np.stack(res_T, -1), np.stack(res_cos, -1)


def christoffel(metric_fn, x, y, h=SECOND_STEP, domain=None):
    """Gamma[..., m, i, j] of a metric given as (E, F, G)."""
    m = metric_fn(x, y)
    g = np.stack([np.stack([m[..., 0], m[..., 1]], -1), np.stack([m[..., 1], m[..., 2]], -1)], -2)
    dm = [derivative(metric_fn, x, y, k, h, domain, extrapolate=True) for k in (0, 1)]
    dg = np.stack([
        np.stack([np.stack([d[..., 0], d[..., 1]], -1), np.stack([d[..., 1], d[..., 2]], -1)], -2)
        for d in dm
    ], -3)  # dg[..., k, i, j] = d_k g_ij
    lower = 0.5 * (np.einsum("...ilj->...lij", dg) + np.einsum("...jli->...lij", dg) - dg)
    # lower[..., l, i, j] = 1/2 (d_i g_lj + d_j g_li - d_l g_ij)
    ginv = np.linalg.inv(g)
    return np.einsum("...ml,...lij->...mij", ginv, lower)


def codazzi_residual(imm, x, y, h_outer=SECOND_STEP, h_inner=FIRST_STEP):
    """Norm (induced metric) of (nabla_x A) d_y - (nabla_y A) d_x - cos(theta)(g(d_x,T) d_y - g(d_y,T) d_x)."""
    x, y = _xy(x, y)
    A_f = lambda u, v: shape_operator(imm, u, v, h_inner)
    A = A_f(x, y)
    dAx = derivative(A_f, x, y, 0, h_outer, imm.domain, extrapolate=True)
    dAy = derivative(A_f, x, y, 1, h_outer, imm.domain, extrapolate=True)
    m_f = lambda u, v: metric(imm, u, v)
    Gam = christoffel(m_f, x, y, h_outer, imm.domain)
    lhs = (dAx[..., :, 1] - dAy[..., :, 0]
           + np.einsum("...k,...mk->...m", A[..., :, 1], Gam[..., :, 0, :])
           - np.einsum("...k,...mk->...m", A[..., :, 0], Gam[..., :, 1, :]))
    fx, fy = partials(imm, x, y, h_inner)
    _, xi = normals(imm, x, y, h_inner)
    cos = xi[..., 3]
    # g(d_i, T) = <f_i, dt> because f_i is orthogonal to xi
    rhs = np.stack([-cos * fy[..., 3], cos * fx[..., 3]], -1)
    r = lhs - rhs
    _, _, _, g = metric_from(fx, fy)
    return np.sqrt(np.abs(np.einsum("...i,...ij,...j", r, g, r)))
