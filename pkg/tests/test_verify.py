import json
import math

import numpy as np
import pytest

from h2xr import families as fm
from h2xr import verify as vf
from h2xr.errors import DegenerateAngle, NotCanonical
from h2xr.surface import Immersion


def small(imm, n=12):
    return vf.interior_grid(imm.domain, n, n)


def test_grid_checks():
    with pytest.raises(ValueError):
        vf.Grid2D(1, 5, 0, 1, 0, 1)
    with pytest.raises(ValueError):
        vf.Grid2D(5, 5, 1, 0, 0, 1)
    g = vf.interior_grid((0, 1, -1, 1), 5, 7)
    X, Y = g.nodes()
    assert X.shape == (5, 7)
    assert X.min() == pytest.approx(0.05) and Y.max() == pytest.approx(0.95)


def test_report_invariants_and_schema():
    imm = fm.make_minimal(1, 0)
    g = small(imm)
    r = vf.mean_curvature_residual(imm, g)
    assert r.name == "minimality"
    assert r.mean_abs <= r.max_abs
    assert r.passed == (r.max_abs <= r.tolerance)
    assert g.x0 <= r.argmax[0] <= g.x1 and g.y0 <= r.argmax[1] <= g.y1
    d = json.loads(json.dumps(r.to_dict()))
    assert set(d) == {"name", "grid", "max_abs", "mean_abs", "tolerance", "pass", "argmax"}
    assert set(d["grid"]) == {"nx", "ny", "x0", "x1", "y0", "y1"}
    assert r.line().startswith("PASS minimality")


def test_reports_are_deterministic():
    imm = fm.make_named_example("cornu")
    g = small(imm)
    a = [vf.principal_direction_residual(imm, g).to_dict(), vf.h2_membership_residual(imm, g).to_dict()]
    b = [vf.principal_direction_residual(imm, g).to_dict(), vf.h2_membership_residual(imm, g).to_dict()]
    assert json.dumps(a) == json.dumps(b)


def test_nonfinite_values_fail():
    g = vf.Grid2D(3, 3, 0, 1, 0, 1)
    X, Y = g.nodes()
    vals = np.zeros((3, 3))
    vals[1, 2] = np.nan
    r = vf.make_report("x", g, X, Y, vals, 1.0)
    assert not r.passed and r.max_abs == math.inf and r.argmax == (0.5, 1.0)


def test_tolerance_is_an_input():
    imm = fm.make_named_example("cmc")
    g = small(imm)
    assert vf.mean_curvature_residual(imm, g, 0.5, 1e-6).passed
    assert not vf.mean_curvature_residual(imm, g, 0.5, 1e-16).passed
    assert not vf.mean_curvature_residual(imm, g, 0.0, 1e-6).passed


def test_not_canonical():
    base = fm.make_minimal(1, 0)
    # x -> x + 0.2 x^2 changes the speed of the x-lines
    imm = Immersion(lambda x, y: base(x + 0.2 * x * x, y), (-1.0, 1.0, -1.0, 1.0))
    with pytest.raises(NotCanonical):
        vf.canonical_pde_residual(imm, small(imm))


def test_degenerate_angle():
    imm = fm.make_named_example("cmc", domain=(-1, 1, -1, 1))
    g = vf.Grid2D(5, 5, -0.5, 0.5, -0.5, 0.5)
    with pytest.raises(DegenerateAngle):
        vf.principal_direction_residual(imm, g)


def test_canonical_pde_on_families():
    for imm in (fm.make_minimal(0, 2), fm.make_flat(-4), fm.make_named_example("cmc")):
        assert vf.canonical_pde_residual(imm, small(imm)).passed


def test_angle_pde_trivial_fields():
    g = vf.Grid2D(8, 8, 0.1, 0.9, 0.1, 0.9)
    flat = fm.AngleField(lambda x, y: np.full(np.shape(x), math.pi / 2))
    for r in vf.minimal_angle_pde_residual(flat, g):
        assert r.max_abs <= 1e-9
    # theta = x: |grad theta| = 1 and Lap theta = 0
    lin = fm.AngleField(lambda x, y: 0.5 + x)
    reps = vf.minimal_angle_pde_residual(lin, g)
    assert reps[0].max_abs <= 1e-10 and reps[2].max_abs <= 1e-6


def test_angle_pde_detects_perturbation():
    base = fm.minimal_angle_field(1.0, 1.0)
    g = small(base, 20)
    assert all(r.passed for r in vf.minimal_angle_pde_residual(base, g))
    bad = vf.minimal_angle_pde_residual(fm.perturbed_angle_field(base, 0.1), g)
    assert not bad[0].passed and not bad[1].passed
    assert bad[2].max_abs <= 1e-6


def test_structure_and_gauss_reports():
    imm = fm.make_named_example("case2_psi_y")
    g = small(imm, 8)
    assert all(r.passed for r in vf.structure_eq_residuals(imm, g))
    assert all(r.passed for r in vf.gauss_codazzi_residuals(imm, g))
    bad = fm.off_hyperboloid(imm)
    assert not vf.structure_eq_residuals(bad, g)[1].passed
    assert not vf.h2_membership_residual(bad, g).passed


def test_scan_examples():
    rep = vf.flat_and_minimal_scan([(1, 0), (0, 1), (-2, 2)])
    assert rep.passed
    assert [e.max_K <= -1e-3 for e in rep.entries] == [True] * 3
    assert all(e.max_oracle_gap <= 1e-7 for e in rep.entries)
    # (0, 1) is the parabolic case where K = -1 everywhere
    assert rep.entries[1].max_K == pytest.approx(-1.0, abs=1e-8)
    assert json.loads(json.dumps(rep.to_dict()))["pass"] is True


def test_admissible_parameters():
    p = vf.admissible_parameters()
    assert len(p) == 24 and (0.0, 0.0) not in p


def test_registry_defaults():
    assert vf.CHECKS["h2_membership"][1] == 1e-9
    assert vf.CHECKS["principal_direction"][1] == 1e-5
    imm = fm.make_flat(0)
    g = small(imm, 8)
    for name, (fn, tol) in vf.CHECKS.items():
        if name in ("minimal_angle_pde", "minimality", "constant_mean_curvature"):
            continue
        for r in fn(imm, g, tol):
            assert r.passed, (name, r.line())
