import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from h2xr.errors import DomainClip, NoConvergence
from h2xr.numerics import (Grid1D, Trajectory, cumulative, diff1, diff2, integrate, richardson, rk4,
                           rk4_span)


@pytest.mark.parametrize("f,a,b", [
    (np.sin, 0.0, math.pi),
    (lambda t: np.exp(-t * t), -3.0, 2.0),
    (lambda t: 1 / np.sqrt(1 - 0.9 * np.sin(t) ** 2), 0.0, 1.5),
    (lambda t: np.sqrt(t), 0.0, 1.0),
    (lambda t: np.cos(50 * t), 0.0, 1.0),
])
def test_integrate_against_scipy(f, a, b):
    assert abs(integrate(f, a, b, 1e-12) - oracles.quad(f, a, b)) <= 1e-11


def test_integrate_reversed_and_empty():
    assert integrate(np.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1), abs=1e-12)
    assert integrate(np.exp, 0.3, 0.3) == 0.0


def test_integrate_scalar_only_callable():
    assert integrate(math.cos, 0.0, 1.0) == pytest.approx(math.sin(1.0), abs=1e-12)


def test_integrate_failures():
    with pytest.raises(NoConvergence), np.errstate(divide="ignore"):
        integrate(lambda t: 1 / t, -1.0, 1.0)
    with pytest.raises(NoConvergence):
        integrate(lambda t: np.abs(t - 0.3) ** -0.9, 0.0, 1.0, 1e-14, limit=20)
    with pytest.raises(ValueError):
        integrate(np.sin, 0, 1, tol=0)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_integrate_additive(a, b, c):
    f = lambda t: np.cos(t) * np.exp(0.3 * t)
    whole = integrate(f, a, c, 1e-13)
    assert abs(whole - integrate(f, a, b, 1e-13) - integrate(f, b, c, 1e-13)) <= 1e-12


def test_cumulative_both_sides():
    nodes = Grid1D(-1.0, 2.0, 7).nodes()
    got = cumulative(np.cos, 0.5, nodes, 1e-12)
    assert np.allclose(got, np.sin(nodes) - math.sin(0.5), atol=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(1.0, 0.0, 5)
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 1)


def test_differences():
    x = np.linspace(0, 1, 5)
    assert np.allclose(diff1(np.sin, x, 1e-3), np.cos(x), atol=1e-11)
    assert np.allclose(diff2(np.sin, x, 1e-2), -np.sin(x), atol=1e-8)
    coarse = np.abs(diff2(np.exp, x, 0.05) - np.exp(x)).max()
    fine = np.abs(richardson(diff2, np.exp, x, 0.05) - np.exp(x)).max()
    assert fine < coarse / 100


def test_stencil_guard():
    with pytest.raises(DomainClip):
        diff1(np.sin, 0.001, 1e-3, (0.0, 1.0))
    diff1(np.sin, 0.002, 1e-3, (0.0, 1.0))


def test_rk4_linear_system_against_expm():
    M = np.array([[0.0, 1.0], [-4.0, -0.1]])
    traj = rk4(lambda y, s: M @ s, 0.0, [1.0, 0.0], 3.0, 1e-3)
    for y in (0.5, 1.2345, 3.0):
        assert np.allclose(traj(y), oracles.linear_flow(M, y, [1.0, 0.0]), atol=1e-10)


def test_rk4_span_backward():
    M = np.array([[0.3]])
    traj = rk4_span(lambda y, s: M @ s, 0.0, [1.0], -2.0, 1.0, 1e-3)
    assert traj.span == (-2.0, 1.0)
    assert traj(-2.0)[0] == pytest.approx(math.exp(-0.6), abs=1e-12)
    assert traj(0.77)[0] == pytest.approx(math.exp(0.3 * 0.77), abs=1e-12)
    with pytest.raises(DomainClip):
        traj(1.5)


def test_rk4_argument_checks():
    with pytest.raises(ValueError):
        rk4(lambda y, s: s, 1.0, [1.0], 0.0)
    with pytest.raises(ValueError):
        rk4(lambda y, s: s, 0.0, [1.0], 1.0, h=0)
    with pytest.raises(ValueError):
        rk4_span(lambda y, s: s, 2.0, [1.0], 0.0, 1.0)


def test_trajectory_requires_increasing():
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], [[1.0], [1.0]], [[0.0], [0.0]])
