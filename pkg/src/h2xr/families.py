"""Constructors for surfaces of H^2 x R whose vertical projection T is a principal direction.

All of them share the form F(x, y) = (A(y) sinh phi(x) + B(y) cosh phi(x), chi(x))
where A lives in de Sitter space, B in H^2, <A, B> = 0, A' || B', and the
plane curve (phi, chi) is parametrised by arc length with angle theta(x):
phi' = cos(theta), chi' = sin(theta).
"""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import (DegenerateParameters, EmptyDomain, InvalidConstants, InvalidCurvePair,
                     InvalidFrame, NotOnH2, UnknownExample)
from .lorentz import cross_l, curve_normal, inner3
from .numerics import DEFAULT_RK4_STEP, diff1, integrate, rk4_span
from .specfun import fresnel_c, fresnel_s, jacobi_am
from .surface import Immersion

CASE_TOL = 1e-12
PAIR_TOL = 1e-8
FRAME_TOL = 1e-10
EDGE_MARGIN = 0.05
PRIMITIVE_TOL = 1e-13


def _const(v):
    v = np.asarray(v, dtype=float)
    return lambda y: np.broadcast_to(v, np.shape(y) + (3,))


def _stack3(a, b, c):
    a, b, c = np.broadcast_arrays(a, b, c)
    return np.stack([a, b, c], axis=-1)


class _Primitive:
    """x -> int_anchor^x f, by quadrature, memoised per abscissa.

    When ``base`` is given the integral up to ``base`` is computed once and
    later calls only integrate from ``base``; this keeps a singular endpoint
    at ``anchor`` out of the repeated work.
    """

    def __init__(self, f, anchor=0.0, base=None, tol=PRIMITIVE_TOL):
        self.f = f
        self.anchor = float(anchor)
        self.base = None if base is None else float(base)
        self.tol = tol
        self._base_value = None
        self._memo = {}

    def _start(self):
        if self.base is None:
            return self.anchor, 0.0
        if self._base_value is None:
            self._base_value = integrate(self.f, self.anchor, self.base, self.tol, limit=10000)
        return self.base, self._base_value

    def _one(self, v):
        v = float(v)
        out = self._memo.get(v)
        if out is None:
            start, offset = self._start()
            out = offset + integrate(self.f, start, v, self.tol)
            self._memo[v] = out
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        uniq, inv = np.unique(x, return_inverse=True)
        vals = np.array([self._one(v) for v in uniq])
        return vals[inv].reshape(x.shape)


@dataclass(frozen=True, eq=False)
class AngleProfile:
    """Angle function theta(x) and the arc-length curve (phi, chi) it determines.

    Closed forms may be supplied for any of phi, chi, sinh(phi), cosh(phi),
    phi' and chi'; missing ones fall back to cos/sin of theta and to
    quadrature from ``anchor``.
    """

    theta: object
    theta_prime: object = None
    domain: tuple = (-math.inf, math.inf)
    anchor: float = 0.0
    phi: object = None
    chi: object = None
    sinh_phi: object = None
    cosh_phi: object = None
    dphi: object = None
    dchi: object = None
    chi_base: float = None
    chi_offset: float = 0.0

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise EmptyDomain(f"angle domain {self.domain} is empty")
        if self.phi is None and self.sinh_phi is None:
            object.__setattr__(self, "_phi_q", _Primitive(self.phi_prime, self.anchor))
        if self.chi is None:
            object.__setattr__(self, "_chi_q", _Primitive(self.chi_prime, self.anchor, self.chi_base))

    def theta_at(self, x):
        return np.asarray(self.theta(np.asarray(x, dtype=float)), dtype=float) * np.ones(np.shape(x))

    def dtheta(self, x):
        x = np.asarray(x, dtype=float)
        if self.theta_prime is not None:
            return np.asarray(self.theta_prime(x), dtype=float) * np.ones(x.shape)
        return diff1(self.theta_at, x, 1e-4)

    def phi_prime(self, x):
        if self.dphi is not None:
            return np.asarray(self.dphi(x), dtype=float) * np.ones(np.shape(x))
        return np.cos(self.theta_at(x))

    def chi_prime(self, x):
        if self.dchi is not None:
            return np.asarray(self.dchi(x), dtype=float) * np.ones(np.shape(x))
        return np.sin(self.theta_at(x))

    def phi_at(self, x):
        x = np.asarray(x, dtype=float)
        if self.phi is not None:
            return np.asarray(self.phi(x), dtype=float) * np.ones(x.shape)
        if self.sinh_phi is not None:
            return np.arcsinh(self.sinh_phi(x))
        return self._phi_q(x)

    def chi_at(self, x):
        x = np.asarray(x, dtype=float)
        if self.chi is not None:
            return np.asarray(self.chi(x), dtype=float) * np.ones(x.shape) + self.chi_offset
        return self._chi_q(x) + self.chi_offset

    def sinh_cosh(self, x):
        x = np.asarray(x, dtype=float)
        if self.sinh_phi is not None:
            return (np.asarray(self.sinh_phi(x), dtype=float) * np.ones(x.shape),
                    np.asarray(self.cosh_phi(x), dtype=float) * np.ones(x.shape))
        p = self.phi_at(x)
        return np.sinh(p), np.cosh(p)


@dataclass(frozen=True, eq=False)
class CurvePair:
    """Curves A (de Sitter) and B (H^2) with their derivatives, over ``span`` in y."""

    A: object
    B: object
    dA: object
    dB: object
    span: tuple = (-1.0, 1.0)


def pair_residuals(pair, ys):
    ys = np.asarray(ys, dtype=float)
    a, b, da, db = pair.A(ys), pair.B(ys), pair.dA(ys), pair.dB(ys)
    cross = np.stack([da[..., i] * db[..., j] - da[..., j] * db[..., i]
                      for i, j in ((0, 1), (0, 2), (1, 2))], -1)
    return {
        "<A,A> = 1": np.abs(inner3(a, a) - 1.0),
        "<B,B> = -1": np.abs(inner3(b, b) + 1.0),
        "<A,B> = 0": np.abs(inner3(a, b)),
        "A' || B'": np.max(np.abs(cross), axis=-1),
    }


def validate_pair(pair, n=41, tol=PAIR_TOL):
    ys = np.linspace(pair.span[0], pair.span[1], n)
    for name, r in pair_residuals(pair, ys).items():
        worst = int(np.argmax(r))
        if r[worst] > tol:
            raise InvalidCurvePair(f"{name} fails by {r[worst]:.3g} at y = {ys[worst]:.6g}")
    if np.any(pair.B(ys)[..., 2] <= 0):
        raise InvalidCurvePair("B leaves the upper sheet of H^2")
    return pair


def shift_phi(pair, phi0):
    """Re-anchor phi: (A, B) -> (A cosh phi0 + B sinh phi0, A sinh phi0 + B cosh phi0).

    The surface built from the new pair with phi - phi0 equals the original one.
    """
    c, s = math.cosh(phi0), math.sinh(phi0)
    return CurvePair(
        A=lambda y: pair.A(y) * c + pair.B(y) * s,
        B=lambda y: pair.A(y) * s + pair.B(y) * c,
        dA=lambda y: pair.dA(y) * c + pair.dB(y) * s,
        dB=lambda y: pair.dA(y) * s + pair.dB(y) * c,
        span=pair.span,
    )


def _surface(pair, prof, domain, meta):
    """Assemble the immersion together with its analytic first partials."""

    def func(x, y):
        sh, ch = prof.sinh_cosh(x)
        h = pair.A(y) * sh[..., None] + pair.B(y) * ch[..., None]
        return np.concatenate([h, prof.chi_at(x)[..., None]], axis=-1)

    def fx(x, y):
        sh, ch = prof.sinh_cosh(x)
        h = (pair.A(y) * ch[..., None] + pair.B(y) * sh[..., None]) * prof.phi_prime(x)[..., None]
        return np.concatenate([h, prof.chi_prime(x)[..., None]], axis=-1)

    def fy(x, y):
        sh, ch = prof.sinh_cosh(x)
        h = pair.dA(y) * sh[..., None] + pair.dB(y) * ch[..., None]
        return np.concatenate([h, np.zeros(np.shape(x) + (1,))], axis=-1)

    meta = dict(meta)
    meta.setdefault("pair", pair)
    meta.setdefault("profile", prof)
    return Immersion(func, domain, fx, fy, meta)


def _domain(prof, pair, domain):
    if domain is not None:
        return tuple(float(v) for v in domain)
    lo, hi = prof.domain
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise EmptyDomain("an explicit domain is needed for an unbounded angle profile")
    return (lo, hi) + tuple(pair.span)


def make_general(pair, angle, domain=None, meta=None):
    """Surface from a validated curve pair and an angle profile."""
    validate_pair(pair)
    return _surface(pair, angle, _domain(angle, pair, domain), meta or {"family": "general"})


def make_from_curve(f, df, angle, d2f=None, span=(-1.0, 1.0), domain=None):
    """Surface built on a single spacelike curve f of H^2: A = N_f, B = f."""
    ys = np.linspace(span[0], span[1], 41)
    p = np.asarray(f(ys), dtype=float)
    bad = (np.abs(inner3(p, p) + 1.0) > PAIR_TOL) | (p[..., 2] <= 0)
    if np.any(bad):
        raise NotOnH2(f"curve leaves H^2 at y = {ys[np.argmax(bad)]:.6g}")
    curve_normal(p, df(ys))

    if d2f is not None:
        def dN(y):
            c = cross_l(f(y), df(y))
            dc = cross_l(f(y), d2f(y))
            q = inner3(df(y), df(y))[..., None]
            dq = 2 * inner3(df(y), d2f(y))[..., None]
            return dc / np.sqrt(q) - c * dq / (2 * q ** 1.5)
    else:
        dN = lambda y: _fd_curve(lambda t: curve_normal(f(t), df(t)), y)

    pair = CurvePair(lambda y: curve_normal(f(y), df(y)), f, dN, df, tuple(span))
    return make_general(pair, angle, domain, {"family": "from_curve"})


def _fd_curve(c, y, h=1e-4):
    y = np.asarray(y, dtype=float)
    return (c(y - 2 * h) - 8 * c(y - h) + 8 * c(y + h) - c(y + 2 * h)) / (12 * h)


# Minimal surfaces

def _longest_gap(zeros, lo, hi, margin):
    """Longest sub-interval of [lo, hi] keeping ``margin`` away from ``zeros`` (ties go right)."""
    cuts = sorted(z for z in zeros if lo - margin < z < hi + margin)
    pieces, start = [], lo
    for z in cuts:
        pieces.append((start, z - margin))
        start = z + margin
    pieces.append((start, hi))
    pieces = [(a, b) for a, b in pieces if b - a > 1e-9]
    if not pieces:
        raise EmptyDomain(f"no admissible interval in [{lo}, {hi}]")
    return max(reversed(pieces), key=lambda p: p[1] - p[0])


def minimal_case(c1, c2):
    s = 1.0 + c1 * c1 - c2 * c2
    if abs(s) <= CASE_TOL:
        return "c"
    return "a" if s > 0 else "b"


def minimal_profile(c1, c2, domain=(-math.inf, math.inf)):
    """theta = angle with cot(theta) = a(x) = c1 cosh x + c2 sinh x, taken in (0, pi)."""
    if c1 == 0 and c2 == 0:
        raise DegenerateParameters("c1 = c2 = 0 makes a(x) vanish identically")
    s = 1.0 + c1 * c1 - c2 * c2
    case = minimal_case(c1, c2)
    a = lambda x: c1 * np.cosh(x) + c2 * np.sinh(x)
    b = lambda x: c1 * np.sinh(x) + c2 * np.cosh(x)
    r = lambda x: np.sqrt(a(x) ** 2 + 1.0)
    if case == "a":
        sh = lambda x: b(x) / math.sqrt(s)
        ch = lambda x: r(x) / math.sqrt(s)
        phi = None
    elif case == "b":
        sh = lambda x: np.sign(b(x)) * r(x) / math.sqrt(-s)
        ch = lambda x: np.abs(b(x)) / math.sqrt(-s)
        phi = None
    else:
        sh = lambda x: np.sign(b(x)) * 0.5 * (np.abs(b(x)) - 1.0 / np.abs(b(x)))
        ch = lambda x: 0.5 * (np.abs(b(x)) + 1.0 / np.abs(b(x)))
        phi = lambda x: np.sign(b(x)) * np.log(np.abs(b(x)))
    return AngleProfile(
        theta=lambda x: np.arctan2(1.0, a(x)),
        theta_prime=lambda x: -b(x) / (1.0 + a(x) ** 2),
        domain=domain,
        anchor=0.0,
        phi=phi,
        sinh_phi=sh,
        cosh_phi=ch,
        dphi=lambda x: a(x) / r(x),
        dchi=lambda x: 1.0 / r(x),
    )


_PARABOLA = CurvePair(
    A=lambda y: _stack3(y, 1 - 0.5 * y * y, 0.5 * y * y),
    B=lambda y: _stack3(y, -0.5 * y * y, 1 + 0.5 * y * y),
    dA=lambda y: _stack3(np.ones(np.shape(y)), -y, y),
    dB=lambda y: _stack3(np.ones(np.shape(y)), -y, y),
)
_HYPERBOLA = CurvePair(
    A=_const([1.0, 0.0, 0.0]),
    B=lambda y: _stack3(np.zeros(np.shape(y)), np.sinh(y), np.cosh(y)),
    dA=_const([0.0, 0.0, 0.0]),
    dB=lambda y: _stack3(np.zeros(np.shape(y)), np.cosh(y), np.sinh(y)),
)
_CIRCLE = CurvePair(
    A=lambda y: _stack3(np.cos(y), np.sin(y), np.zeros(np.shape(y))),
    B=_const([0.0, 0.0, 1.0]),
    dA=lambda y: _stack3(-np.sin(y), np.cos(y), np.zeros(np.shape(y))),
    dB=_const([0.0, 0.0, 0.0]),
)


def _with_span(pair, span):
    return CurvePair(pair.A, pair.B, pair.dA, pair.dB, tuple(span))


def minimal_domain(c1, c2, lo=-1.5, hi=1.5, margin=EDGE_MARGIN):
    zeros = []
    if c2 != 0 and abs(c1 / c2) < 1:
        zeros.append(math.atanh(-c1 / c2))
    return _longest_gap(zeros, lo, hi, margin)


def make_minimal(c1, c2, domain=None):
    """Minimal surface with T principal, one of three shapes depending on the sign of
    1 + c1^2 - c2^2.

    The default x-range is the longest piece of [-1.5, 1.5] keeping 0.05
    away from the zero of a(x) (where theta = pi/2); y ranges over [-1, 1].
    """
    c1, c2 = float(c1), float(c2)
    if c1 == 0 and c2 == 0:
        raise DegenerateParameters("c1 = c2 = 0 makes a(x) vanish identically")
    if domain is None:
        x0, x1 = minimal_domain(c1, c2)
        domain = (x0, x1, -1.0, 1.0)
    else:
        domain = tuple(float(v) for v in domain)
        xs = np.linspace(domain[0], domain[1], 201)
        a = c1 * np.cosh(xs) + c2 * np.sinh(xs)
        if np.any(np.sign(a) != np.sign(a[0])) or np.any(a == 0):
            raise EmptyDomain(f"a(x) vanishes on [{domain[0]}, {domain[1]}]")
    case = minimal_case(c1, c2)
    pair = {"a": _HYPERBOLA, "b": _CIRCLE, "c": _PARABOLA}[case]
    if case == "c" and c2 < 0:
        # here phi = -ln|b|, so the y-dependent part of the parabola must ride on e^-phi
        pair = CurvePair(lambda y: -_PARABOLA.A(y), _PARABOLA.B, lambda y: -_PARABOLA.dA(y), _PARABOLA.dB)
    prof = minimal_profile(c1, c2, domain[:2])
    meta = {"family": "minimal", "c1": c1, "c2": c2, "case": case}
    return _surface(_with_span(pair, domain[2:]), prof, domain, meta)


# Flat surfaces

def flat_case(c):
    if abs(c + 1.0) <= CASE_TOL:
        return "c"
    return "a" if c > -1 else "b"


def flat_left_edge(c):
    return math.sqrt(max(-c, 0.0))


def flat_profile(c, domain, chi_offset=0.0):
    """theta = arctan sqrt(x^2 + c); chi is measured from the natural edge sqrt(max(-c, 0))."""
    c = float(c)
    case = flat_case(c)
    xa = flat_left_edge(c)
    q = lambda x: x * x + c
    if case == "a":
        sh = lambda x: x / math.sqrt(c + 1)
        ch = lambda x: np.sqrt(q(x) + 1) / math.sqrt(c + 1)
        phi = None
    elif case == "b":
        sh = lambda x: np.sqrt(q(x) + 1) / math.sqrt(-c - 1)
        ch = lambda x: x / math.sqrt(-c - 1)
        phi = None
    else:
        sh = lambda x: 0.5 * (x - 1.0 / x)
        ch = lambda x: 0.5 * (x + 1.0 / x)
        phi = np.log
    return AngleProfile(
        theta=lambda x: np.arctan(np.sqrt(q(x))),
        theta_prime=lambda x: x / (np.sqrt(q(x)) * (q(x) + 1)),
        domain=domain,
        anchor=xa,
        phi=phi,
        sinh_phi=sh,
        cosh_phi=ch,
        dphi=lambda x: 1.0 / np.sqrt(q(x) + 1),
        dchi=lambda x: np.sqrt(q(x)) / np.sqrt(q(x) + 1),
        chi_base=domain[0],
        chi_offset=chi_offset,
    )


def make_flat(c, domain=None, chi_offset=0.0):
    """Flat surface with T principal; theta = arctan sqrt(x^2 + c).

    Defined for x > sqrt(max(-c, 0)); the default x-range starts 0.05 past
    that edge and has length 1.5.
    """
    c = float(c)
    xa = flat_left_edge(c)
    if domain is None:
        domain = (xa + EDGE_MARGIN, xa + EDGE_MARGIN + 1.5, -1.0, 1.0)
    domain = tuple(float(v) for v in domain)
    if not domain[0] > xa:
        raise EmptyDomain(f"flat surface with c = {c} needs x > {xa}, got x0 = {domain[0]}")
    case = flat_case(c)
    pair = {"a": _CIRCLE, "b": _HYPERBOLA, "c": _PARABOLA}[case]
    prof = flat_profile(c, domain[:2], chi_offset)
    imm = _surface(_with_span(pair, domain[2:]), prof, domain,
                   {"family": "flat", "c": c, "case": case})
    return _guarded(imm, xa)


def _guarded(imm, xa):
    """Reject evaluation at x <= xa instead of returning NaN."""
    def check(fn):
        def wrapped(x, y):
            if np.any(np.asarray(x) <= xa):
                raise EmptyDomain(f"x must exceed {xa}")
            return fn(x, y)
        return wrapped
    return Immersion(check(imm.func), imm.domain, check(imm.fx), check(imm.fy), imm.meta)


# Frames of the classification ODE

@dataclass
class FrameState:
    A: np.ndarray
    B: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        self.A, self.B, self.H = (np.asarray(v, dtype=float) for v in (self.A, self.B, self.H))

    def residuals(self):
        A, B, H = self.A, self.B, self.H
        return {
            "<A,A> = 1": inner3(A, A) - 1.0,
            "<B,B> = -1": inner3(B, B) + 1.0,
            "<H,H> = 1": inner3(H, H) - 1.0,
            "<A,B> = 0": inner3(A, B),
            "<A,H> = 0": inner3(A, H),
            "<B,H> = 0": inner3(B, H),
        }

    def validate(self, tol=FRAME_TOL):
        for name, r in self.residuals().items():
            if np.max(np.abs(r)) > tol:
                raise InvalidFrame(f"initial frame violates {name} by {np.max(np.abs(r)):.3g}")
        if self.B[2] <= 0:
            raise InvalidFrame("B must lie on the upper sheet of H^2")
        return self


def frame_field(case, psi):
    """Right-hand side of the 9-dimensional frame ODE for cases 1 and 2."""
    def rhs(y, s):
        A, B, H = s[0:3], s[3:6], s[6:9]
        p = psi(y)
        ch, sh = math.cosh(p), math.sinh(p)
        if case == 1:
            return np.concatenate([H * ch, H * sh, B * sh - A * ch])
        return np.concatenate([H * sh, H * ch, -A * sh + B * ch])
    return rhs


def _check_constants(c1, c2, c3, tol=FRAME_TOL):
    rel = {
        "<c1,c1> = 1": inner3(c1, c1) - 1, "<c2,c2> = -1": inner3(c2, c2) + 1,
        "<c3,c3> = 1": inner3(c3, c3) - 1, "<c1,c2> = 0": inner3(c1, c2),
        "<c1,c3> = 0": inner3(c1, c3), "<c2,c3> = 0": inner3(c2, c3),
    }
    for name, r in rel.items():
        if abs(r) > tol:
            raise InvalidConstants(f"{name} fails by {abs(r):.3g}")
    if c2[2] <= 0:
        raise InvalidConstants("c2 must lie on the upper sheet of H^2")


def make_theorem3(case, psi, init, angle, span=(-1.0, 1.0), h=DEFAULT_RK4_STEP, sign=1, domain=None):
    """Surface from the frame ODE (cases 1, 2) or the closed-form parabola (case 3).

    ``init`` is a FrameState at y = 0 for cases 1 and 2 and a triple of
    constant vectors (c1, c2, c3) for case 3. The frame trajectory and the
    curve H are kept in ``meta``.
    """
    if case not in (1, 2, 3):
        raise ValueError(f"case must be 1, 2 or 3, got {case}")
    lo, hi = float(span[0]), float(span[1])
    if case in (1, 2):
        if not isinstance(init, FrameState):
            init = FrameState(*init)
        init.validate()
        rhs = frame_field(case, psi)
        traj = rk4_span(rhs, 0.0, np.concatenate([init.A, init.B, init.H]), min(lo, 0.0), max(hi, 0.0), h)
        kA, kB = (math.cosh, math.sinh) if case == 1 else (math.sinh, math.cosh)
        ps = np.vectorize(lambda t: float(psi(t)))
        H = lambda y: traj(y)[..., 6:9]
        pair = CurvePair(
            A=lambda y: traj(y)[..., 0:3],
            B=lambda y: traj(y)[..., 3:6],
            dA=lambda y: H(y) * np.vectorize(kA)(ps(y))[..., None],
            dB=lambda y: H(y) * np.vectorize(kB)(ps(y))[..., None],
            span=(lo, hi),
        )

        def dH(y):
            y = np.asarray(y, dtype=float)
            out = [rhs(t, s)[6:9] for t, s in zip(y.ravel(), traj(y.ravel()))]
            return np.asarray(out).reshape(y.shape + (3,))

        meta = {"family": "theorem3", "case": case, "trajectory": traj, "H": H, "dH": dH}
    else:
        c1, c2, c3 = (np.asarray(v, dtype=float) for v in init)
        _check_constants(c1, c2, c3)
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        q = lambda y: np.asarray(y, dtype=float)[..., None]
        pair = CurvePair(
            A=lambda y: (sign * c2 - c1) * q(y) ** 2 / 2 + sign * c3 * q(y) + c1,
            B=lambda y: (c2 - sign * c1) * q(y) ** 2 / 2 + c3 * q(y) + c2,
            dA=lambda y: (sign * c2 - c1) * q(y) + sign * c3,
            dB=lambda y: (c2 - sign * c1) * q(y) + c3,
            span=(lo, hi),
        )
        H = pair.dB
        dH = lambda y: np.broadcast_to(c2 - sign * c1, np.shape(y) + (3,))
        meta = {"family": "theorem3", "case": 3, "H": H, "dH": dH}
    return make_general(pair, angle, domain, meta)


# Angle field of minimal surfaces with theta_x = k theta_y

@dataclass(frozen=True)
class AngleField:
    theta: object
    domain: tuple = (0.0, 1.0, 0.0, 1.0)
    meta: dict = field(default_factory=dict)

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self.theta(x, y)


def minimal_angle_field(k, c, sign=1, domain=(0.0, 1.0, 0.0, 1.0)):
    """theta(x, y) = am(sign (k x + y) / sqrt(k^2 + 1) | -c)."""
    if k == 0:
        raise DegenerateParameters("k must be non-zero")
    if c < 0:
        raise DegenerateParameters("c must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    scale = sign / math.sqrt(k * k + 1)
    am = lru_cache(maxsize=None)(lambda u: jacobi_am(u, -c))
    vam = np.vectorize(lambda u: am(float(u)), otypes=[float])
    return AngleField(lambda x, y: vam(scale * (k * x + y)), domain,
                      {"family": "minimal_angle_field", "k": k, "c": c, "sign": sign})


def perturbed_angle_field(base, eps):
    """base + eps x y: a control that should fail the minimal-angle PDE."""
    return AngleField(lambda x, y: base(x, y) + eps * x * y, base.domain,
                      dict(base.meta, perturb=eps))


# Positive controls

def perturbed(base, amplitude=0.1):
    """Feed theta(x) + amplitude sin y into the product form.

    The profile curve is rotated by s(y) = amplitude sin y about the origin
    of the (phi, chi) plane, so the angle of the curve at height x becomes
    theta(x) + s(y) while T stops being principal and the normal bundle
    picks up curvature.
    """
    pair, prof = base.meta["pair"], base.meta["profile"]

    def parts(x, y):
        s = amplitude * np.sin(y)
        ds = amplitude * np.cos(y)
        p, q = prof.phi_at(x), prof.chi_at(x)
        dp, dq = prof.phi_prime(x), prof.chi_prime(x)
        P = np.cos(s) * p - np.sin(s) * q
        Q = np.sin(s) * p + np.cos(s) * q
        return P, Q, np.cos(s) * dp - np.sin(s) * dq, np.sin(s) * dp + np.cos(s) * dq, -ds * Q, ds * P

    def func(x, y):
        P, Q, *_ = parts(x, y)
        h = pair.A(y) * np.sinh(P)[..., None] + pair.B(y) * np.cosh(P)[..., None]
        return np.concatenate([h, Q[..., None]], -1)

    def fx(x, y):
        P, Q, Px, Qx, _, _ = parts(x, y)
        h = (pair.A(y) * np.cosh(P)[..., None] + pair.B(y) * np.sinh(P)[..., None]) * Px[..., None]
        return np.concatenate([h, Qx[..., None]], -1)

    def fy(x, y):
        P, Q, _, _, Py, Qy = parts(x, y)
        h = (pair.dA(y) * np.sinh(P)[..., None] + pair.dB(y) * np.cosh(P)[..., None]
             + (pair.A(y) * np.cosh(P)[..., None] + pair.B(y) * np.sinh(P)[..., None]) * Py[..., None])
        return np.concatenate([h, Qy[..., None]], -1)

    return Immersion(func, base.domain, fx, fy,
                     {"family": "perturbed", "amplitude": amplitude, "base": base.meta.get("family")})


def off_hyperboloid(base, eps=0.05):
    """Scale the H^2 part by (1 + eps x): fails H^2 membership."""
    def func(x, y):
        p = base(x, y)
        return np.concatenate([p[..., :3] * (1 + eps * x)[..., None], p[..., 3:]], -1)
    return Immersion(func, base.domain, meta={"family": "off_hyperboloid", "eps": eps})


# Catalog

def _theta_x_profile(lo, hi):
    return AngleProfile(theta=lambda x: x, theta_prime=lambda x: np.ones(np.shape(x)), domain=(lo, hi),
                        phi=np.sin, chi=lambda x: 1 - np.cos(x), dphi=np.cos, dchi=np.sin)


def _example_rotation():
    pair = CurvePair(
        A=lambda y: _stack3(np.sin(y), np.cos(y), np.zeros(np.shape(y))),
        B=_const([0.0, 0.0, 1.0]),
        dA=lambda y: _stack3(np.cos(y), -np.sin(y), np.zeros(np.shape(y))),
        dB=_const([0.0, 0.0, 0.0]),
    )
    return make_general(pair, _theta_x_profile(0.1, 1.5), meta={"family": "example", "id": "rotation"})


def _example_case2_arccos():
    pair = CurvePair(
        A=_const([0.0, 1.0, 0.0]),
        B=lambda y: _stack3(np.sinh(y), np.zeros(np.shape(y)), np.cosh(y)),
        dA=_const([0.0, 0.0, 0.0]),
        dB=lambda y: _stack3(np.cosh(y), np.zeros(np.shape(y)), np.sinh(y)),
    )
    prof = AngleProfile(theta=np.arccos, theta_prime=lambda x: -1 / np.sqrt(1 - x * x), domain=(0.1, 0.9),
                        phi=lambda x: 0.5 * x * x, chi=lambda x: 0.5 * (x * np.sqrt(1 - x * x) + np.arcsin(x)),
                        dphi=lambda x: x, dchi=lambda x: np.sqrt(1 - x * x))
    return make_general(pair, prof, meta={"family": "example", "id": "case2_arccos"})


def _example_case1_psi_y():
    sh, ch = np.sinh, np.cosh
    pair = CurvePair(
        A=lambda y: _stack3(y * sh(y) - ch(y), -y * y / 2 * sh(y) + y * ch(y), y * y / 2 * sh(y) - y * ch(y) + sh(y)),
        B=lambda y: _stack3(y * ch(y) - sh(y), -y * y / 2 * ch(y) + y * sh(y), y * y / 2 * ch(y) - y * sh(y) + ch(y)),
        dA=lambda y: _stack3(y * ch(y), -y * y / 2 * ch(y) + ch(y), y * y / 2 * ch(y)),
        dB=lambda y: _stack3(y * sh(y), -y * y / 2 * sh(y) + sh(y), y * y / 2 * sh(y)),
        span=(0.0, 1.0),
    )
    # sinh(phi + y) vanishes on y = -sin x, so y stays non-negative
    return make_general(pair, _theta_x_profile(0.1, 1.5), meta={"family": "example", "id": "case1_psi_y"})


def _example_case2_psi_y():
    r = math.sqrt(2.0)
    sh, ch = np.sinh, np.cosh

    def A(y):
        return _stack3(sh(r * y) * sh(y) - ch(r * y) * ch(y) / r, ch(y) / r, ch(r * y) * sh(y) - sh(r * y) * ch(y) / r)

    def B(y):
        return _stack3(sh(r * y) * ch(y) - ch(r * y) * sh(y) / r, sh(y) / r, ch(r * y) * ch(y) - sh(r * y) * sh(y) / r)

    def dA(y):
        return _stack3(ch(r * y), np.ones(np.shape(y)), sh(r * y)) * (sh(y) / r)[..., None]

    def dB(y):
        return _stack3(ch(r * y), np.ones(np.shape(y)), sh(r * y)) * (ch(y) / r)[..., None]

    pair = CurvePair(A, B, dA, dB)
    return make_general(pair, _theta_x_profile(0.1, 1.5), meta={"family": "example", "id": "case2_psi_y"})


def _example_parabola():
    return make_general(_PARABOLA, _theta_x_profile(0.1, 1.5), meta={"family": "example", "id": "parabola"})


def _example_cornu():
    k = math.sqrt(math.pi / 2)
    fc = np.vectorize(lru_cache(maxsize=None)(fresnel_c), otypes=[float])
    fs = np.vectorize(lru_cache(maxsize=None)(fresnel_s), otypes=[float])
    prof = AngleProfile(theta=lambda x: x * x, theta_prime=lambda x: 2 * x, domain=(0.3, 1.2),
                        phi=lambda x: k * fc(x / k), chi=lambda x: k * fs(x / k),
                        dphi=lambda x: np.cos(x * x), dchi=lambda x: np.sin(x * x))
    return make_general(_PARABOLA, prof, meta={"family": "example", "id": "cornu"})


def _example_cmc():
    prof = AngleProfile(theta=np.arctan, theta_prime=lambda x: 1 / (1 + x * x), domain=(0.2, 1.5),
                        phi=np.arcsinh, chi=lambda x: np.sqrt(1 + x * x) - 1,
                        sinh_phi=lambda x: x, cosh_phi=lambda x: np.sqrt(1 + x * x),
                        dphi=lambda x: 1 / np.sqrt(1 + x * x), dchi=lambda x: x / np.sqrt(1 + x * x))
    return make_general(_HYPERBOLA, prof, meta={"family": "example", "id": "cmc"})


def _example_geodesic_cylinder():
    def func(x, y):
        return np.stack([np.zeros(np.shape(x)), np.sinh(y), np.cosh(y), x], -1)

    def fx(x, y):
        z = np.zeros(np.shape(x))
        return np.stack([z, z, z, np.ones(np.shape(x))], -1)

    def fy(x, y):
        z = np.zeros(np.shape(x))
        return np.stack([z, np.cosh(y), np.sinh(y), z], -1)

    return Immersion(func, (-1.0, 1.0, -1.0, 1.0), fx, fy, {"family": "example", "id": "geodesic_cylinder"})


EXAMPLES = {
    "rotation": _example_rotation,
    "case2_arccos": _example_case2_arccos,
    "case1_psi_y": _example_case1_psi_y,
    "case2_psi_y": _example_case2_psi_y,
    "parabola": _example_parabola,
    "cornu": _example_cornu,
    "cmc": _example_cmc,
    "geodesic_cylinder": _example_geodesic_cylinder,
}
ALIASES = {"rotation_theta_x": "rotation"}


def make_named_example(name, domain=None):
    """Closed-form surface from the catalog; ``domain`` overrides its default rectangle."""
    key = ALIASES.get(name, name)
    if key not in EXAMPLES:
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(sorted(EXAMPLES))}")
    imm = EXAMPLES[key]()
    if domain is not None:
        imm = replace(imm, domain=tuple(float(v) for v in domain))
    return imm
