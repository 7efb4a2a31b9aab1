"""Sympy helpers used as an independent reference for series results."""

import numpy as np
import sympy as sp

from symdiff3.series import Series2

z, w = sp.symbols("z w")


def taylor(expr, n: int) -> Series2:
    """Taylor coefficients of a rational sympy expression through degree n."""
    arr = np.zeros((n + 1, n + 1), dtype=complex)
    in_z = sp.series(expr, z, 0, n + 1).removeO()
    for i in range(n + 1):
        ci = sp.expand(in_z.coeff(z, i))
        in_w = sp.series(ci, w, 0, n + 1 - i).removeO()
        for j in range(n + 1 - i):
            arr[i, j] = complex(sp.N(in_w.coeff(w, j)))
    return Series2(arr, n)


def d1(u):
    return sp.diff(u[1], z) - sp.diff(u[0], w)


def wedge(u, v):
    return u[0] * v[1] - u[1] * v[0]


def grad(h):
    return (sp.diff(h, z), sp.diff(h, w))


def scale(s, u):
    return (s * u[0], s * u[1])


def add(*us):
    return (sum(u[0] for u in us), sum(u[1] for u in us))


def adapted_web(f, g):
    """Frame pieces of (f dz, g dw, -f dz - g dw) as sympy expressions."""
    omega = [(f, sp.Integer(0)), (sp.Integer(0), g), (-f, -g)]
    Omega = wedge(omega[0], omega[1])
    h = [d1(x) / Omega for x in omega]
    gamma = add(scale(h[1], omega[0]), scale(-h[0], omega[1]))
    return omega, Omega, h, gamma, d1(gamma)


def beta(f, g, i, j, k, l):
    omega, Omega, h, _, dgamma = adapted_web(f, g)
    u = d1(scale(h[i - 1], omega[j - 1])) / Omega
    coef = (2 * u * d1(omega[k - 1]) + wedge(grad(u), omega[k - 1])) / dgamma
    return scale(coef, omega[l - 1])
