"""Grid residuals for the identities that characterise the surfaces in ``families``.

Each verifier samples an interior grid and returns one or more
ResidualReports; tolerances are arguments and the defaults in CHECKS are
the pinned acceptance values.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import surface as sf
from .errors import DegenerateAngle, NotCanonical
from .families import AngleField, make_minimal

GRID_MARGIN = 0.05
CANONICAL_TOL = 1e-6
# ln tan(theta/2) is steep where theta is small; 1e-2 leaves visible truncation there
ANGLE_PDE_STEP = 5e-3


@dataclass(frozen=True)
class Grid2D:
    nx: int
    ny: int
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs nx, ny >= 2")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("grid rectangle is empty")

    def nodes(self):
        xs = np.linspace(self.x0, self.x1, self.nx)
        ys = np.linspace(self.y0, self.y1, self.ny)
        return np.meshgrid(xs, ys, indexing="ij")

    def as_dict(self):
        return {"nx": self.nx, "ny": self.ny, "x0": self.x0, "x1": self.x1, "y0": self.y0, "y1": self.y1}


def interior_grid(domain, nx=50, ny=50, margin=GRID_MARGIN):
    """Grid over ``domain`` shrunk by ``margin`` so that every stencil stays inside."""
    x0, x1, y0, y1 = domain
    return Grid2D(nx, ny, x0 + margin, x1 - margin, y0 + margin, y1 - margin)


@dataclass
class ResidualReport:
    name: str
    grid: Grid2D
    max_abs: float
    mean_abs: float
    tolerance: float
    passed: bool
    argmax: tuple
    note: str = ""

    def to_dict(self):
        d = {
            "name": self.name,
            "grid": self.grid.as_dict(),
            "max_abs": self.max_abs,
            "mean_abs": self.mean_abs,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "argmax": {"x": self.argmax[0], "y": self.argmax[1]},
        }
        if self.note:
            d["note"] = self.note
        return d

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: max {self.max_abs:.3e} (tol {self.tolerance:.1e}), mean {self.mean_abs:.3e}"


def make_report(name, grid, X, Y, values, tol, note=""):
    v = np.abs(np.asarray(values, dtype=float))
    v = np.where(np.isfinite(v), v, np.inf)
    i = np.unravel_index(int(np.argmax(v)), v.shape)
    mx = float(v[i])
    return ResidualReport(name, grid, mx, float(np.mean(v)), float(tol), bool(mx <= tol),
                          (float(X[i]), float(Y[i])), note)


def failed_report(name, grid, tol, reason):
    """Report for a check whose precondition does not hold on the input."""
    x = 0.5 * (grid.x0 + grid.x1)
    y = 0.5 * (grid.y0 + grid.y1)
    return ResidualReport(name, grid, math.inf, math.inf, float(tol), False, (x, y), reason)


def _quad(v, g, w):
    return np.einsum("...i,...ij,...j", v, g, w)


# Individual verifiers

def h2_membership_residual(imm, grid, tol=1e-9):
    X, Y = grid.nodes()
    p = imm(X, Y)
    r = np.abs(p[..., 0] ** 2 + p[..., 1] ** 2 - p[..., 2] ** 2 + 1.0)
    r = np.where(p[..., 2] > 0, r, np.inf)
    return make_report("h2_membership", grid, X, Y, r, tol)


def principal_direction_residual(imm, grid, tol=1e-5):
    """|g(A e1, e2)| with e1 = T/|T| and e2 the unit tangent g-orthogonal to it."""
    X, Y = grid.nodes()
    s = sf.sample(imm, X, Y)
    if np.min(np.sin(s.theta)) < 1e-3:
        raise DegenerateAngle("sin(theta) < 1e-3 on the grid: T does not define a direction")
    g = s.gram
    t = sf.tangent_coords(g, s.f_x, s.f_y, s.T)
    t = t / np.sqrt(_quad(t, g, t))[..., None]
    w = np.einsum("...ij,...j", g, t)
    e = np.stack([-w[..., 1], w[..., 0]], -1)
    e = e / np.sqrt(_quad(e, g, e))[..., None]
    At = np.einsum("...ij,...j", s.shape, t)
    return make_report("principal_direction", grid, X, Y, _quad(At, g, e), tol)


def mean_curvature_residual(imm, grid, target=0.0, tol=1e-6):
    """||H| - target|; named "minimality" for target 0."""
    X, Y = grid.nodes()
    s = sf.sample(imm, X, Y)
    name = "minimality" if target == 0 else "constant_mean_curvature"
    return make_report(name, grid, X, Y, np.abs(s.Hmean) - target, tol)


def flatness_residuals(imm, grid, tol=1e-4):
    """(|det A - cos^2 theta|, |intrinsic K|)."""
    X, Y = grid.nodes()
    s = sf.sample(imm, X, Y)
    Ki = sf.gauss_intrinsic(imm, X, Y)
    return (make_report("flatness", grid, X, Y, s.K, tol),
            make_report("intrinsic_flatness", grid, X, Y, Ki, tol))


def check_canonical(imm, grid, tol=CANONICAL_TOL):
    X, Y = grid.nodes()
    m = sf.metric(imm, X, Y)
    dE = np.max(np.abs(m[..., 0] - 1.0))
    dF = np.max(np.abs(m[..., 1]))
    if dE > tol or dF > tol:
        raise NotCanonical(f"metric is not dx^2 + beta^2 dy^2: |E - 1| = {dE:.3g}, |F| = {dF:.3g}")


def canonical_pde_residual(imm, grid, tol=1e-4):
    """beta_xx + tan(theta) theta_x beta_x - beta cos^2(theta) with beta = sqrt(G)."""
    check_canonical(imm, grid)
    X, Y = grid.nodes()
    beta = lambda u, v: np.sqrt(sf.metric(imm, u, v)[..., 2])
    bx = sf.derivative(beta, X, Y, 0, sf.SECOND_STEP, imm.domain, extrapolate=True)
    bxx = sf.derivative(beta, X, Y, 0, sf.SECOND_STEP, imm.domain, order=2, extrapolate=True)
    th = sf.theta_field(imm)
    theta = th(X, Y)
    tx = sf.derivative(th, X, Y, 0, sf.FIRST_STEP, imm.domain)
    r = bxx + np.tan(theta) * tx * bx - beta(X, Y) * np.cos(theta) ** 2
    return make_report("canonical_pde", grid, X, Y, r, tol)


def minimal_angle_pde_residual(field_, grid, tol=1e-6):
    """Two equivalent forms of the minimality condition for the angle function.

    Returns reports for cos(theta)(|grad theta|^2 - 1) - sin(theta) Lap(theta),
    for sin^2(theta) Lap(ln tan(theta/2)) + cos(theta), and for their sum,
    which vanishes identically (the second form is minus the first).
    """
    X, Y = grid.nodes()
    dom = field_.domain if isinstance(field_, AngleField) else None
    d = lambda f, axis, order=1: sf.derivative(f, X, Y, axis, ANGLE_PDE_STEP, dom, order, extrapolate=True)
    th = field_(X, Y)
    tx, ty = d(field_, 0), d(field_, 1)
    lap = d(field_, 0, 2) + d(field_, 1, 2)
    r11 = np.cos(th) * (tx ** 2 + ty ** 2 - 1.0) - np.sin(th) * lap
    L = lambda u, v: np.log(np.tan(0.5 * field_(u, v)))
    r10 = np.sin(th) ** 2 * (d(L, 0, 2) + d(L, 1, 2)) + np.cos(th)
    return (make_report("minimal_angle_pde", grid, X, Y, r11, tol),
            make_report("minimal_angle_pde_log_form", grid, X, Y, r10, tol),
            make_report("minimal_angle_pde_agreement", grid, X, Y, r10 + r11, tol))


def normal_flatness_residuals(imm, grid, tol_identity=1e-4, tol_flat=1e-5):
    """(identity, flatness): |R_perp xi - sin(theta) d theta ^ dt xi_tilde| and |R_perp xi|."""
    X, Y = grid.nodes()
    R = sf.normal_curvature(imm, X, Y)
    E = sf.normal_curvature_expected(imm, X, Y)
    xt, xi = sf.normals(imm, X, Y)
    return (make_report("normal_flatness_identity", grid, X, Y, sf.normal_norm(R - E, xi, xt), tol_identity),
            make_report("normal_flatness", grid, X, Y, sf.normal_norm(R, xi, xt), tol_flat))


def gauss_codazzi_residuals(imm, grid, tol_gauss=5e-4, tol_codazzi=1e-3):
    X, Y = grid.nodes()
    s = sf.sample(imm, X, Y)
    Ki = sf.gauss_intrinsic(imm, X, Y)
    return (make_report("gauss", grid, X, Y, Ki - s.K, tol_gauss),
            make_report("codazzi", grid, X, Y, sf.codazzi_residual(imm, X, Y), tol_codazzi))


def structure_eq_residuals(imm, grid, tol=1e-4):
    X, Y = grid.nodes()
    res_T, res_cos = sf.structure_residuals(imm, X, Y)
    return (make_report("structure_eq_T", grid, X, Y, np.max(res_T, -1), tol),
            make_report("structure_eq_angle", grid, X, Y, np.max(res_cos, -1), tol))


# Flat and minimal at once

@dataclass
class ScanEntry:
    c1: float
    c2: float
    domain: tuple
    max_K: float
    max_K_oracle: float
    max_oracle_gap: float


@dataclass
class ScanReport:
    entries: list = field(default_factory=list)
    threshold: float = -1e-3
    passed: bool = True

    def to_dict(self):
        return {"threshold": self.threshold, "pass": self.passed,
                "entries": [vars(e) for e in self.entries]}


def minimal_K_oracle(c1, c2, x):
    """K = -theta_x^2 - cos^2(theta) for theta = arccot(c1 cosh x + c2 sinh x)."""
    a = c1 * np.cosh(x) + c2 * np.sinh(x)
    b = c1 * np.sinh(x) + c2 * np.cosh(x)
    return -(b / (1 + a * a)) ** 2 - a * a / (1 + a * a)


def flat_and_minimal_scan(params, nx=20, ny=5, threshold=-1e-3):
    """Check that no minimal surface of the family is flat: max K < threshold on each grid."""
    rep = ScanReport(threshold=threshold)
    for c1, c2 in params:
        imm = make_minimal(c1, c2)
        grid = interior_grid(imm.domain, nx, ny)
        X, Y = grid.nodes()
        K = sf.sample(imm, X, Y).K
        Ko = minimal_K_oracle(c1, c2, X)
        e = ScanEntry(float(c1), float(c2), imm.domain, float(np.max(K)), float(np.max(Ko)),
                      float(np.max(np.abs(K - Ko))))
        rep.entries.append(e)
        rep.passed &= e.max_K <= threshold
    return rep


def admissible_parameters(lo=-2.0, hi=2.0, n=5):
    vals = np.linspace(lo, hi, n)
    return [(float(a), float(b)) for a in vals for b in vals if not (a == 0 and b == 0)]


# Registry used by the command line

def _one(fn):
    return lambda obj, grid, tol, **kw: [fn(obj, grid, tol)]


CHECKS = {
    "h2_membership": (_one(h2_membership_residual), 1e-9),
    "principal_direction": (_one(principal_direction_residual), 1e-5),
    "minimality": (lambda o, g, t, **kw: [mean_curvature_residual(o, g, 0.0, t)], 1e-6),
    "constant_mean_curvature": (
        lambda o, g, t, target=0.5, **kw: [mean_curvature_residual(o, g, target, t)], 1e-6),
    "flatness": (lambda o, g, t, **kw: [flatness_residuals(o, g, t)[0]], 1e-4),
    "intrinsic_flatness": (
        lambda o, g, t, **kw: [make_report("intrinsic_flatness", g, *g.nodes(), sf.gauss_intrinsic(o, *g.nodes()), t)],
        1e-4),
    "canonical_pde": (_one(canonical_pde_residual), 1e-4),
    "minimal_angle_pde": (lambda o, g, t, **kw: list(minimal_angle_pde_residual(o, g, t)), 1e-6),
    "normal_flatness": (lambda o, g, t, **kw: [normal_flatness_residuals(o, g, tol_flat=t)[1]], 1e-5),
    "normal_flatness_identity": (
        lambda o, g, t, **kw: [normal_flatness_residuals(o, g, tol_identity=t)[0]], 1e-4),
    "gauss": (lambda o, g, t, **kw: [gauss_codazzi_residuals(o, g, tol_gauss=t)[0]], 5e-4),
    "codazzi": (lambda o, g, t, **kw: [make_report("codazzi", g, *g.nodes(), sf.codazzi_residual(o, *g.nodes()), t)],
                1e-3),
    "structure_eq": (lambda o, g, t, **kw: list(structure_eq_residuals(o, g, t)), 1e-4),
}
