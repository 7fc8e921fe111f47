"""Quadrature, finite differences and a fixed-step RK4 integrator."""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DomainClip, NoConvergence

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_FD_STEP = 1e-3
DEFAULT_RK4_STEP = 1e-3

# Kronrod 15-point nodes on [0, 1] (the rule is symmetric) and both weight sets.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
_WG15 = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps


def _eval(f, x):
    """Evaluate ``f`` on an array, falling back to a Python loop for scalar-only callables."""
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(xi)) for xi in x])


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = _eval(f, c + h * _NODES)
    if not np.all(np.isfinite(fx)):
        raise NoConvergence(f"integrand is not finite on [{a}, {b}]")
    k = h * np.dot(_WK15, fx)
    g = h * np.dot(_WG15, fx)
    return k, abs(k - g), abs(h) * np.dot(_WK15, np.abs(fx))


def integrate(f, a, b, tol=DEFAULT_QUAD_TOL, limit=2000):
    """Adaptive Gauss-Kronrod (G7/K15) quadrature with an absolute tolerance.

    The interval with the largest |K15 - G7| is bisected until the summed
    estimate drops below ``tol`` (or below the roundoff floor of the
    integral). Raises NoConvergence after ``limit`` bisections.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, b, a, tol, limit)

    k, err, absint = _gk15(f, a, b)
    heap = [(-err, a, b, k, absint)]
    total, total_err, total_abs = k, err, absint
    splits = 0
    while total_err > max(tol, 50 * _EPS * total_abs):
        if splits >= limit:
            raise NoConvergence(
                f"quadrature on [{a}, {b}] stalled at error {total_err:.3g} after {limit} bisections")
        negerr, lo, hi, kk, aa = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        k1, e1, a1 = _gk15(f, lo, mid)
        k2, e2, a2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, k1, a1))
        heapq.heappush(heap, (-e2, mid, hi, k2, a2))
        total += k1 + k2 - kk
        total_err += e1 + e2 + negerr
        total_abs += a1 + a2 - aa
        splits += 1
    # re-sum to avoid drift from the running updates
    return float(math.fsum(item[3] for item in heap))


@dataclass(frozen=True)
class Grid1D:
    start: float
    stop: float
    n: int

    def __post_init__(self):
        if not self.start < self.stop:
            raise ValueError("Grid1D requires start < stop")
        if self.n < 2:
            raise ValueError("Grid1D requires n >= 2")

    def nodes(self):
        return np.linspace(self.start, self.stop, self.n)


def cumulative(f, x0, grid, tol=DEFAULT_QUAD_TOL):
    """Values of the integral of ``f`` from ``x0`` to every node of ``grid``.

    Accepts a Grid1D or any 1-D array of nodes.
    """
    nodes = grid.nodes() if isinstance(grid, Grid1D) else np.asarray(grid, dtype=float)
    out = np.empty(nodes.shape)
    order = np.argsort(nodes, kind="stable")
    seg_tol = tol / max(len(nodes), 1)
    right = [i for i in order if nodes[i] >= x0]
    left = [i for i in order[::-1] if nodes[i] < x0]
    for chain in (right, left):
        prev, acc = float(x0), 0.0
        for i in chain:
            acc += integrate(f, prev, nodes[i], seg_tol)
            prev = nodes[i]
            out[i] = acc
    return out


def _check_stencil(x, h, domain):
    if domain is None:
        return
    lo, hi = domain
    x = np.asarray(x, dtype=float)
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.any(x - 2 * h < lo - slack) or np.any(x + 2 * h > hi + slack):
        raise DomainClip(f"5-point stencil of step {h} leaves the domain [{lo}, {hi}]")


def diff1(f, x, h=DEFAULT_FD_STEP, domain=None):
    """Fourth-order central first derivative."""
    if h <= 0:
        raise ValueError("h must be positive")
    _check_stencil(x, h, domain)
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def diff2(f, x, h=DEFAULT_FD_STEP, domain=None):
    """Fourth-order central second derivative."""
    if h <= 0:
        raise ValueError("h must be positive")
    _check_stencil(x, h, domain)
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)


def richardson(rule, f, x, h, domain=None):
    """One Richardson step on a fourth-order rule using steps h and h/2."""
    coarse = rule(f, x, h, domain)
    fine = rule(f, x, 0.5 * h, domain)
    return fine + (fine - coarse) / 15.0


@dataclass
class Trajectory:
    """RK4 output; calling it interpolates with cubic Hermite splines."""

    ys: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    _spline: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        self.ys = np.asarray(self.ys, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        self.derivs = np.asarray(self.derivs, dtype=float)
        if len(self.ys) != len(self.states):
            raise ValueError("parameter and state arrays differ in length")
        if np.any(np.diff(self.ys) <= 0):
            raise ValueError("trajectory parameters must be strictly increasing")
        self._spline = CubicHermiteSpline(self.ys, self.states, self.derivs, axis=0, extrapolate=False)

    def __call__(self, y):
        out = self._spline(y)
        if np.any(np.isnan(out)):
            raise DomainClip(f"trajectory covers [{self.ys[0]}, {self.ys[-1]}] only")
        return out

    @property
    def span(self):
        return self.ys[0], self.ys[-1]


def _rk4_nodes(field_fn, y0, state0, y1, h):
    n = max(1, math.ceil((y1 - y0) / h - 1e-9))
    step = (y1 - y0) / n
    ys = y0 + step * np.arange(n + 1)
    ys[-1] = y1
    states = np.empty((n + 1,) + np.shape(state0))
    states[0] = state0
    s = np.asarray(state0, dtype=float)
    for i in range(n):
        y = ys[i]
        k1 = field_fn(y, s)
        k2 = field_fn(y + 0.5 * step, s + 0.5 * step * k1)
        k3 = field_fn(y + 0.5 * step, s + 0.5 * step * k2)
        k4 = field_fn(y + step, s + step * k3)
        s = s + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        states[i + 1] = s
    return ys, states


def rk4(field_fn, y0, state0, y1, h=DEFAULT_RK4_STEP):
    """Classical fixed-step RK4 from y0 to y1 (> y0); the step is shrunk to land on y1."""
    if h <= 0:
        raise ValueError("h must be positive")
    if not y1 > y0:
        raise ValueError("rk4 integrates forward: need y1 > y0")
    ys, states = _rk4_nodes(field_fn, float(y0), state0, float(y1), h)
    derivs = np.array([field_fn(y, s) for y, s in zip(ys, states)])
    return Trajectory(ys, states, derivs)


def rk4_span(field_fn, y_init, state0, lo, hi, h=DEFAULT_RK4_STEP):
    """Integrate from ``y_init`` both backward to ``lo`` and forward to ``hi``."""
    if not lo <= y_init <= hi or lo == hi:
        raise ValueError("need lo <= y_init <= hi and lo < hi")
    state0 = np.asarray(state0, dtype=float)
    ys = [np.array([y_init])]
    states = [state0[None]]
    if hi > y_init:
        fy, fs = _rk4_nodes(field_fn, y_init, state0, hi, h)
        ys.append(fy[1:])
        states.append(fs[1:])
    if lo < y_init:
        # s = -y turns the backward problem into a forward one
        back = lambda s, u: -field_fn(-s, u)
        by, bs = _rk4_nodes(back, -y_init, state0, -lo, h)
        ys.insert(0, -by[1:][::-1])
        states.insert(0, bs[1:][::-1])
    ys = np.concatenate(ys)
    states = np.concatenate(states)
    derivs = np.array([field_fn(y, s) for y, s in zip(ys, states)])
    return Trajectory(ys, states, derivs)
