"""JSON encoding of surface families.

A spec is a dict with a ``family`` key. Curves and angle functions are
given as expression strings in ``x`` (angle) or ``y`` (curves), parsed
with sympy, which also supplies their exact derivatives.
"""

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from .errors import SpecError
from . import families as fm

_X, _Y = sympy.symbols("x y", real=True)


def _parse(text, var, where):
    if not isinstance(text, (str, int, float)):
        raise SpecError(where, f"expected an expression string, got {type(text).__name__}")
    try:
        expr = parse_expr(str(text), local_dict={"x": _X, "y": _Y}, transformations=standard_transformations)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise SpecError(where, f"cannot parse {text!r}: {exc}") from None
    extra = expr.free_symbols - {var}
    if extra:
        raise SpecError(where, f"unexpected symbols {sorted(map(str, extra))} (only {var} allowed)")
    return expr


def _fn(expr, var):
    f = sympy.lambdify(var, expr, "numpy")
    return lambda t: np.asarray(f(np.asarray(t, dtype=float)), dtype=float) * np.ones(np.shape(t))


def _curve(exprs, where):
    if not isinstance(exprs, (list, tuple)) or len(exprs) != 3:
        raise SpecError(where, "expected a list of three expressions")
    comps = [_parse(e, _Y, f"{where}[{i}]") for i, e in enumerate(exprs)]
    derivs = [[sympy.diff(c, _Y, k) for c in comps] for k in (0, 1, 2)]
    fns = [[_fn(c, _Y) for c in d] for d in derivs]
    return [lambda y, fs=fs: np.stack([f(y) for f in fs], -1) for fs in fns]


def _vec3(v, where):
    try:
        a = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(where, "expected three numbers") from None
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise SpecError(where, "expected three finite numbers")
    return a


def _domain(d, where="domain"):
    if d is None:
        return None
    try:
        d = [float(v) for v in d]
    except (TypeError, ValueError):
        raise SpecError(where, "expected [x0, x1, y0, y1]") from None
    if len(d) != 4 or not (d[0] < d[1] and d[2] < d[3]):
        raise SpecError(where, "expected [x0, x1, y0, y1] with x0 < x1 and y0 < y1")
    return tuple(d)


def _number(d, key, default=None, where=None):
    v = d.get(key, default)
    if v is None:
        raise SpecError(where or key, "missing")
    try:
        return float(v)
    except (TypeError, ValueError):
        raise SpecError(where or key, f"expected a number, got {v!r}") from None


def _angle(text, domain, anchor=0.0, where="theta"):
    th = _parse(text, _X, where)
    return fm.AngleProfile(theta=_fn(th, _X), theta_prime=_fn(sympy.diff(th, _X), _X),
                           domain=domain[:2], anchor=anchor)


@dataclass
class MinimalSpec:
    c1: float
    c2: float
    domain: Optional[tuple] = None
    family: str = "minimal"

    def build(self):
        return fm.make_minimal(self.c1, self.c2, self.domain)


@dataclass
class FlatSpec:
    c: float
    domain: Optional[tuple] = None
    chi_offset: float = 0.0
    family: str = "flat"

    def build(self):
        return fm.make_flat(self.c, self.domain, self.chi_offset)


@dataclass
class ExampleSpec:
    id: str
    domain: Optional[tuple] = None
    family: str = "example"

    def build(self):
        return fm.make_named_example(self.id, self.domain)


@dataclass
class GeneralSpec:
    A: list
    B: list
    theta: str
    domain: tuple
    anchor: float = 0.0
    family: str = "general"

    def build(self):
        A, dA, _ = _curve(self.A, "A")
        B, dB, _ = _curve(self.B, "B")
        pair = fm.CurvePair(A, B, dA, dB, self.domain[2:])
        return fm.make_general(pair, _angle(self.theta, self.domain, self.anchor), self.domain)


@dataclass
class FromCurveSpec:
    f: list
    theta: str
    domain: tuple
    anchor: float = 0.0
    family: str = "from_curve"

    def build(self):
        f, df, d2f = _curve(self.f, "f")
        return fm.make_from_curve(f, df, _angle(self.theta, self.domain, self.anchor), d2f,
                                  self.domain[2:], self.domain)


@dataclass
class Theorem3Spec:
    case: int
    theta: str
    domain: tuple
    psi: str = "0"
    frame: Optional[dict] = None
    constants: Optional[list] = None
    sign: int = 1
    anchor: float = 0.0
    family: str = "theorem3"

    def build(self):
        angle = _angle(self.theta, self.domain, self.anchor)
        psi = _fn(_parse(self.psi, _Y, "psi"), _Y)
        if self.case in (1, 2):
            if not isinstance(self.frame, dict):
                raise SpecError("frame", "cases 1 and 2 need {A, B, H}")
            init = fm.FrameState(*(_vec3(self.frame.get(k), f"frame.{k}") for k in "ABH"))
        else:
            if not isinstance(self.constants, (list, tuple)) or len(self.constants) != 3:
                raise SpecError("constants", "case 3 needs three vectors c1, c2, c3")
            init = [_vec3(c, f"constants[{i}]") for i, c in enumerate(self.constants)]
        return fm.make_theorem3(self.case, lambda y: float(psi(y)), init, angle,
                                span=self.domain[2:], sign=self.sign, domain=self.domain)


@dataclass
class PerturbedSpec:
    base: object
    amplitude: float = 0.1
    family: str = "perturbed"

    def build(self):
        return fm.perturbed(self.base.build(), self.amplitude)


@dataclass
class OffHyperboloidSpec:
    base: object
    eps: float = 0.05
    family: str = "off_hyperboloid"

    def build(self):
        return fm.off_hyperboloid(self.base.build(), self.eps)


@dataclass
class AngleFieldSpec:
    k: float = 1.0
    c: float = 1.0
    sign: int = 1
    perturb: float = 0.0
    domain: tuple = (0.0, 1.0, 0.0, 1.0)
    family: str = "angle_field"

    def build(self):
        f = fm.minimal_angle_field(self.k, self.c, self.sign, self.domain)
        return fm.perturbed_angle_field(f, self.perturb) if self.perturb else f


def _sign(d):
    s = d.get("sign", 1)
    if s not in (1, -1):
        raise SpecError("sign", "must be 1 or -1")
    return int(s)


def parse_spec(d):
    """Spec object from a decoded JSON dict; raises SpecError naming the bad field."""
    if not isinstance(d, dict):
        raise SpecError("spec", "expected a JSON object")
    fam = d.get("family")
    if fam == "minimal":
        return MinimalSpec(_number(d, "c1"), _number(d, "c2"), _domain(d.get("domain")))
    if fam == "flat":
        return FlatSpec(_number(d, "c"), _domain(d.get("domain")), _number(d, "chi_offset", 0.0))
    if fam == "example":
        if not isinstance(d.get("id"), str):
            raise SpecError("id", "expected an example name")
        return ExampleSpec(d["id"], _domain(d.get("domain")))
    if fam in ("general", "from_curve", "theorem3"):
        dom = _domain(d.get("domain"))
        if dom is None:
            raise SpecError("domain", "missing")
        if "theta" not in d:
            raise SpecError("theta", "missing")
        anchor = _number(d, "anchor", 0.0)
        if fam == "general":
            for k in ("A", "B"):
                if k not in d:
                    raise SpecError(k, "missing")
            return GeneralSpec(list(d["A"]), list(d["B"]), d["theta"], dom, anchor)
        if fam == "from_curve":
            if "f" not in d:
                raise SpecError("f", "missing")
            return FromCurveSpec(list(d["f"]), d["theta"], dom, anchor)
        case = d.get("case")
        if case not in (1, 2, 3):
            raise SpecError("case", "must be 1, 2 or 3")
        return Theorem3Spec(case, d["theta"], dom, str(d.get("psi", "0")), d.get("frame"),
                            d.get("constants"), _sign(d), anchor)
    if fam == "perturbed":
        return PerturbedSpec(parse_spec(d.get("base")), _number(d, "amplitude", 0.1))
    if fam == "off_hyperboloid":
        return OffHyperboloidSpec(parse_spec(d.get("base")), _number(d, "eps", 0.05))
    if fam == "angle_field":
        return AngleFieldSpec(_number(d, "k", 1.0), _number(d, "c", 1.0), _sign(d),
                              _number(d, "perturb", 0.0), _domain(d.get("domain")) or (0.0, 1.0, 0.0, 1.0))
    raise SpecError("family", f"unknown family {fam!r}")


def spec_to_dict(spec):
    out = {}
    for k, v in asdict(spec).items():
        if v is None:
            continue
        if isinstance(v, tuple):
            v = list(v)
        out[k] = v
    if hasattr(spec, "base"):
        out["base"] = spec_to_dict(spec.base)
    return out


def loads(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("spec", f"invalid JSON: {exc}") from None
    return parse_spec(d)


def dumps(spec):
    return json.dumps(spec_to_dict(spec), sort_keys=True)


def build(spec):
    return spec.build()
