"""Incomplete elliptic integral F(z|m), Jacobi amplitude and Fresnel integrals.

Convention: F(z|m) = int_0^z dt / sqrt(1 - m sin^2 t), i.e. ``m`` is the
*parameter* (the square of the modulus), and it may be negative.
"""

import math

import numpy as np

from .errors import NoConvergence, SingularIntegrand
from .numerics import integrate

SPECFUN_TOL = 1e-14
_FRESNEL_SWITCH = 6.0


def _ellip_integrand(m):
    return lambda t: 1.0 / np.sqrt(1.0 - m * np.sin(t) ** 2)


def _ellip_quad(z, m):
    return integrate(_ellip_integrand(m), 0.0, z, SPECFUN_TOL)


def ellip_k(m):
    """Complete integral K(m) = F(pi/2 | m), for m < 1."""
    if m >= 1:
        raise SingularIntegrand(f"K(m) diverges for m = {m} >= 1")
    return _ellip_quad(0.5 * math.pi, m)


def ellip_f(z, m):
    """Incomplete elliptic integral of the first kind, by adaptive quadrature.

    For m < 1 the argument is reduced modulo pi using
    F(z + k pi | m) = F(z | m) + 2 k K(m). For m >= 1 the integrand is only
    real while m sin^2 t < 1, which restricts |z| < arcsin(1/sqrt(m)).
    """
    z = float(z)
    m = float(m)
    if not (math.isfinite(z) and math.isfinite(m)):
        raise ValueError("ellip_f needs finite arguments")
    if m == 0.0:
        return z
    if z < 0:
        return -ellip_f(-z, m)
    if m >= 1.0:
        limit = math.asin(1.0 / math.sqrt(m))
        if z >= limit:
            raise SingularIntegrand(f"1 - m sin^2 t vanishes on [0, {z}] for m = {m}")
        return _ellip_quad(z, m)
    k = math.floor(z / math.pi + 0.5)
    r = z - k * math.pi
    base = _ellip_quad(r, m)
    if k == 0:
        return base
    return 2 * k * ellip_k(m) + base


def jacobi_am(u, m, tol=1e-15, maxiter=100):
    """Inverse of ellip_f in its first argument (real amplitude regime m < 1).

    Newton iteration on F(theta|m) - u, kept inside a bisection bracket.
    """
    u = float(u)
    m = float(m)
    if m >= 1.0:
        raise ValueError(f"jacobi_am needs m < 1, got {m}")
    if not math.isfinite(u):
        raise ValueError("jacobi_am needs a finite argument")
    if u == 0.0 or m == 0.0:
        return u
    if u < 0:
        return -jacobi_am(-u, m, tol, maxiter)

    # F' lies between 1 and 1/sqrt(1-m), which brackets the root.
    s = math.sqrt(1.0 - m)
    lo, hi = u * min(1.0, s), u * max(1.0, s)
    theta = u / math.sqrt(1.0 - 0.5 * m)
    if not lo <= theta <= hi:
        theta = 0.5 * (lo + hi)
    for _ in range(maxiter):
        resid = ellip_f(theta, m) - u
        if resid > 0:
            hi = min(hi, theta)
        else:
            lo = max(lo, theta)
        step = resid * math.sqrt(1.0 - m * math.sin(theta) ** 2)
        new = theta - step
        if not lo <= new <= hi:
            new = 0.5 * (lo + hi)
        if abs(new - theta) <= tol * max(1.0, abs(theta)) or hi - lo <= tol * max(1.0, abs(theta)):
            return new
        theta = new
    raise NoConvergence(f"jacobi_am({u}, {m}) did not converge in {maxiter} iterations")


def _fresnel_asymptotic(z):
    """Large-argument expansion through the auxiliary functions f and g."""
    x = math.pi * z * z
    inv = 1.0 / (x * x)
    # f ~ 1/(pi z) sum (-1)^n (4n-1)!! / x^(2n), g ~ 1/(pi x z) sum (-1)^n (4n+1)!! / x^(2n)
    f_sum, g_sum = 0.0, 0.0
    f_term, g_term = 1.0, 1.0
    prev_f, prev_g = math.inf, math.inf
    n = 0
    while True:
        if abs(f_term) > prev_f or abs(g_term) > prev_g:
            break
        f_sum += f_term
        g_sum += g_term
        if abs(f_term) < 1e-17 and abs(g_term) < 1e-17:
            break
        prev_f, prev_g = abs(f_term), abs(g_term)
        n += 1
        f_term *= -(4 * n - 3) * (4 * n - 1) * inv
        g_term *= -(4 * n - 1) * (4 * n + 1) * inv
    f = f_sum / (math.pi * z)
    g = g_sum / (math.pi * x * z)
    phase = 0.5 * math.pi * z * z
    c = 0.5 + f * math.sin(phase) - g * math.cos(phase)
    s = 0.5 - f * math.cos(phase) - g * math.sin(phase)
    return c, s


def _fresnel(z, which):
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("Fresnel integrals need a finite argument")
    if z < 0:
        return -_fresnel(-z, which)
    if z == 0.0:
        return 0.0
    if z > _FRESNEL_SWITCH:
        return _fresnel_asymptotic(z)[which]
    trig = np.cos if which == 0 else np.sin
    return integrate(lambda t: trig(0.5 * np.pi * t * t), 0.0, z, SPECFUN_TOL, limit=10000)


def fresnel_c(z):
    """C(z) = int_0^z cos(pi t^2 / 2) dt."""
    return _fresnel(z, 0)


def fresnel_s(z):
    """S(z) = int_0^z sin(pi t^2 / 2) dt."""
    return _fresnel(z, 1)
