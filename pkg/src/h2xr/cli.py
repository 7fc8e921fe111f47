"""Command line: generate meshes, run verifiers, evaluate special functions, build catalog examples.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration
error, 3 numerical failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import specfun, specs
from . import surface as sf
from .errors import GeometryError, NumericalError, SpecError
from .families import AngleField, make_named_example
from .mesh import CHARTS, FORMATS, export
from .verify import CHECKS, failed_report, interior_grid

log = logging.getLogger("h2xr")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SPECFUNS = {
    "ellip_f": (specfun.ellip_f, 2),
    "jacobi_am": (specfun.jacobi_am, 2),
    "fresnel_c": (specfun.fresnel_c, 1),
    "fresnel_s": (specfun.fresnel_s, 1),
}

EXAMPLE_CHECKS = {
    "rotation": ["principal_direction", "normal_flatness", "h2_membership", "gauss", "codazzi"],
    "cornu": ["principal_direction", "normal_flatness", "h2_membership"],
    "cmc": ["principal_direction", "constant_mean_curvature", "canonical_pde", "h2_membership"],
}
DEFAULT_EXAMPLE_CHECKS = ["principal_direction", "normal_flatness", "h2_membership"]


@dataclass
class RunConfig:
    spec: object
    checks: list
    tolerances: dict = field(default_factory=dict)
    nx: int = 50
    ny: int = 50
    target_h: float = 0.5

    def __post_init__(self):
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise SpecError("checks", f"unknown verifier(s) {unknown}; known: {sorted(CHECKS)}")
        if not self.checks:
            raise SpecError("checks", "empty list")
        bad = [k for k in self.tolerances if k not in CHECKS]
        if bad:
            raise SpecError("tol", f"tolerance given for unknown verifier(s) {bad}")
        if self.nx < 5 or self.ny < 5:
            raise SpecError("grid", "nx and ny must be at least 5")


def run_checks(obj, config):
    """Run the configured verifiers; violated preconditions become failed reports."""
    grid = interior_grid(obj.domain, config.nx, config.ny)
    reports = []
    for name in config.checks:
        fn, default = CHECKS[name]
        tol = config.tolerances.get(name, default)
        target = obj
        if isinstance(obj, AngleField) and name != "minimal_angle_pde":
            raise SpecError("checks", f"{name} needs a surface, got an angle field")
        if name == "minimal_angle_pde" and not isinstance(obj, AngleField):
            target = AngleField(sf.theta_field(obj), obj.domain)
        try:
            reports.extend(fn(target, grid, tol, target=config.target_h))
        except GeometryError as exc:
            log.warning("%s: %s", name, exc)
            reports.append(failed_report(name, grid, tol, f"{type(exc).__name__}: {exc}"))
    return reports


def _load_spec(text):
    p = Path(text)
    if not text.lstrip().startswith("{") and p.exists():
        text = p.read_text()
    return specs.loads(text)


def _parse_tols(items):
    out = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise SpecError("tol", f"expected name=value, got {item!r}")
        try:
            out[name] = float(val)
        except ValueError:
            raise SpecError("tol", f"bad number in {item!r}") from None
    return out


def cmd_generate(args):
    imm = _load_spec(args.spec).build()
    if isinstance(imm, AngleField):
        raise SpecError("family", "angle fields have no mesh")
    grid = interior_grid(imm.domain, args.nx, args.ny, args.margin)
    for p in export(imm, grid, args.chart, args.format, args.out):
        print(p)
    return EXIT_PASS


def cmd_verify(args):
    spec = _load_spec(args.spec)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    config = RunConfig(spec, checks, _parse_tols(args.tol), args.nx, args.ny, args.target_h)
    reports = run_checks(spec.build(), config)
    text = json.dumps([r.to_dict() for r in reports], indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n")
    for r in reports:
        print(r.line())
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def cmd_specfun(args):
    fn, arity = SPECFUNS[args.name]
    if len(args.args) != arity:
        raise SpecError("args", f"{args.name} takes {arity} argument(s)")
    try:
        vals = [float(a) for a in args.args]
    except ValueError:
        raise SpecError("args", "arguments must be numbers") from None
    print("%.15g" % fn(*vals))
    return EXIT_PASS


def cmd_example(args):
    imm = make_named_example(args.id)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = interior_grid(imm.domain, args.nx, args.ny)
    for p in export(imm, grid, "poincare", "obj", out / f"{args.id}.obj"):
        print(p)
    checks = EXAMPLE_CHECKS.get(args.id, DEFAULT_EXAMPLE_CHECKS)
    reports = run_checks(imm, RunConfig(specs.ExampleSpec(args.id), checks, nx=args.nx, ny=args.ny))
    (out / f"{args.id}.report.json").write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    for r in reports:
        print(r.line())
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="h2xr", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="export a surface mesh")
    g.add_argument("--spec", required=True, help="family JSON (inline or a file path)")
    g.add_argument("--nx", type=int, default=50)
    g.add_argument("--ny", type=int, default=50)
    g.add_argument("--margin", type=float, default=0.05)
    g.add_argument("--chart", choices=CHARTS, default="poincare")
    g.add_argument("--format", choices=FORMATS, default="obj")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="run residual checks")
    v.add_argument("--spec", required=True)
    v.add_argument("--checks", required=True, help="comma-separated verifier names")
    v.add_argument("--report", help="write the JSON reports here")
    v.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")
    v.add_argument("--nx", type=int, default=50)
    v.add_argument("--ny", type=int, default=50)
    v.add_argument("--target-h", type=float, default=0.5, help="|H| for constant_mean_curvature")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("specfun", help="evaluate a special function")
    s.add_argument("name", choices=sorted(SPECFUNS))
    s.add_argument("args", nargs="+")
    s.set_defaults(func=cmd_specfun)

    e = sub.add_parser("example", help="mesh and check a catalog example")
    e.add_argument("id")
    e.add_argument("--out-dir", required=True)
    e.add_argument("--nx", type=int, default=30)
    e.add_argument("--ny", type=int, default=30)
    e.set_defaults(func=cmd_example)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GeometryError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
