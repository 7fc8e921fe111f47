"""Grid meshes of a surface: OBJ or CSV, in raw R^3_1 x R coordinates or a Poincare-disk chart."""

from pathlib import Path

import numpy as np

from . import surface as sf
from .errors import SpecError

CHARTS = ("raw4d", "poincare")
FORMATS = ("obj", "csv")


def poincare_chart(p):
    """(x1, x2, x3, t) -> (x1/(1+x3), x2/(1+x3), t); for display only."""
    p = np.asarray(p, dtype=float)
    d = 1.0 + p[..., 2]
    return np.stack([p[..., 0] / d, p[..., 1] / d, p[..., 3]], -1)


def _num(v):
    # -0.0 + 0.0 is 0.0, so signed zeros do not leak into the text
    return "%.17g" % (float(v) + 0.0)


def _row(vals):
    return ",".join(_num(v) for v in vals)


def triangles(nx, ny):
    """1-based vertex triples; vertex (i, j) of the grid has index i*ny + j + 1."""
    faces = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            a = i * ny + j + 1
            b = a + ny
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return faces


def curvature_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".curvature.csv")


def export(imm, grid, chart="poincare", fmt="obj", out="mesh.obj"):
    """Write the mesh (and, for OBJ, a per-vertex curvature CSV). Returns written paths."""
    if chart not in CHARTS:
        raise SpecError("chart", f"expected one of {CHARTS}")
    if fmt not in FORMATS:
        raise SpecError("format", f"expected one of {FORMATS}")
    if fmt == "obj" and chart == "raw4d":
        raise SpecError("chart", "OBJ vertices are 3D; use --format csv for raw4d")
    X, Y = grid.nodes()
    P = imm(X, Y).reshape(-1, 4)
    V = P if chart == "raw4d" else poincare_chart(P)
    out = Path(out)
    if fmt == "csv":
        head = "x1,x2,x3,t" if chart == "raw4d" else "u,v,t"
        out.write_text("\n".join([head] + [_row(v) for v in V]) + "\n")
        return [out]
    lines = ["v " + " ".join(_num(c) for c in v) for v in V]
    lines += ["f %d %d %d" % f for f in triangles(grid.nx, grid.ny)]
    out.write_text("\n".join(lines) + "\n")
    s = sf.sample(imm, X, Y)
    cols = [X, Y, s.k1, s.k2, s.K, s.Hmean, s.theta]
    table = np.stack([c.reshape(-1) for c in cols], -1)
    cpath = curvature_path(out)
    cpath.write_text("\n".join(["x,y,k1,k2,K,H,theta"] + [_row(r) for r in table]) + "\n")
    return [out, cpath]
