"""Reference values computed without the package: scipy, mpmath, sympy, matrix exponentials."""

import math
import warnings

import mpmath
import numpy as np
import sympy
from scipy import integrate, special
from scipy.linalg import expm

mpmath.mp.dps = 30


def quad(f, a, b):
    with warnings.catch_warnings():
        # quad warns when it cannot certify 1e-14; the value is still the best it has
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-14, limit=500)
    return val


def ellip_f(z, m):
    """F(z|m) for any real m, by mpmath at 30 digits."""
    return float(mpmath.ellipf(z, m))


def jacobi_am(u, m):
    """am(u|m) for 0 <= m < 1 through scipy's ellipj."""
    return float(special.ellipj(u, m)[3])


def fresnel_c(z):
    return float(special.fresnel(z)[1])


def fresnel_s(z):
    return float(special.fresnel(z)[0])


def linear_flow(M, y, state0):
    """Solution of s' = M s from s(0) = state0."""
    return expm(M * y) @ np.asarray(state0, dtype=float)


def frame_matrix(case, psi):
    """Constant-psi frame ODE written as a 9x9 linear system on (A, B, H)."""
    c, s = math.cosh(psi), math.sinh(psi)
    I = np.eye(3)
    Z = np.zeros((3, 3))
    if case == 1:
        return np.block([[Z, Z, c * I], [Z, Z, s * I], [-c * I, s * I, Z]])
    return np.block([[Z, Z, s * I], [Z, Z, c * I], [-s * I, c * I, Z]])


def inner3(u, v):
    return u[0] * v[0] + u[1] * v[1] - u[2] * v[2]


# Closed forms derived by hand and checked symbolically in the tests

def minimal_theta(c1, c2, x):
    a = c1 * math.cosh(x) + c2 * math.sinh(x)
    return math.atan2(1.0, a)


def minimal_chi(c1, c2, x):
    return quad(lambda t: 1 / math.sqrt((c1 * math.cosh(t) + c2 * math.sinh(t)) ** 2 + 1), 0.0, x)


def minimal_K(c1, c2, x):
    """K = -theta_x^2 - cos^2 theta in arc-length coordinates."""
    a = c1 * math.cosh(x) + c2 * math.sinh(x)
    b = c1 * math.sinh(x) + c2 * math.cosh(x)
    return -(b / (1 + a * a)) ** 2 - a * a / (1 + a * a)


def sym_angle_ode_residual():
    """Symbolic residual of theta'' - 2 cot(theta) theta'^2 + cos(theta) sin(theta) for theta = arccot(a)."""
    x, c1, c2 = sympy.symbols("x c1 c2", real=True)
    a = c1 * sympy.cosh(x) + c2 * sympy.sinh(x)
    th = sympy.acot(a)
    r = sympy.diff(th, x, 2) - 2 * sympy.cot(th) * sympy.diff(th, x) ** 2 + sympy.cos(th) * sympy.sin(th)
    return sympy.simplify(r.rewrite(sympy.exp))
