"""Exterior calculus in the fixed coframe ``(dz, dw)``.

Forms are coefficient tuples of :class:`~symdiff3.series.Series2`; nothing is
symbolic.  A symmetric 3-differential is stored as the binary cubic

    c0 dz^3 + c1 dz^2 dw + c2 dz dw^2 + c3 dw^3.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

from .errors import SingularJacobian
from .series import (
    UNIT_TOL,
    W,
    Z,
    Series2,
    compose,
    invert,
    linear_part,
    partial,
)


@dataclass(frozen=True, eq=False)
class OneForm:
    p: Series2  # dz coefficient
    q: Series2  # dw coefficient

    @classmethod
    def dz(cls, n: int) -> "OneForm":
        return cls(Series2.const(1, n), Series2.zero(n))

    @classmethod
    def dw(cls, n: int) -> "OneForm":
        return cls(Series2.zero(n), Series2.const(1, n))

    @property
    def max_order(self) -> int:
        return self.p.max_order

    @property
    def valid_order(self) -> int:
        return min(self.p.valid_order, self.q.valid_order)

    def __add__(self, other: "OneForm") -> "OneForm":
        if not isinstance(other, OneForm):
            return NotImplemented
        return OneForm(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "OneForm") -> "OneForm":
        if not isinstance(other, OneForm):
            return NotImplemented
        return OneForm(self.p - other.p, self.q - other.q)

    def __neg__(self) -> "OneForm":
        return OneForm(-self.p, -self.q)

    def __rmul__(self, s) -> "OneForm":
        if isinstance(s, (Series2, Number)):
            return OneForm(self.p * s, self.q * s)
        return NotImplemented

    def at_origin(self) -> np.ndarray:
        return np.array([self.p.constant, self.q.constant])


@dataclass(frozen=True, eq=False)
class TwoForm:
    r: Series2  # dz^dw coefficient

    @property
    def valid_order(self) -> int:
        return self.r.valid_order

    def __add__(self, other: "TwoForm") -> "TwoForm":
        if not isinstance(other, TwoForm):
            return NotImplemented
        return TwoForm(self.r + other.r)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        if not isinstance(other, TwoForm):
            return NotImplemented
        return TwoForm(self.r - other.r)

    def __neg__(self) -> "TwoForm":
        return TwoForm(-self.r)

    def __rmul__(self, s) -> "TwoForm":
        if isinstance(s, (Series2, Number)):
            return TwoForm(self.r * s)
        return NotImplemented


@dataclass(frozen=True, eq=False)
class Sym3Diff:
    c0: Series2
    c1: Series2
    c2: Series2
    c3: Series2

    @property
    def coeffs(self) -> tuple[Series2, Series2, Series2, Series2]:
        return (self.c0, self.c1, self.c2, self.c3)

    @property
    def max_order(self) -> int:
        return min(c.max_order for c in self.coeffs)

    @property
    def valid_order(self) -> int:
        return min(c.valid_order for c in self.coeffs)

    def __add__(self, other: "Sym3Diff") -> "Sym3Diff":
        return Sym3Diff(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Sym3Diff") -> "Sym3Diff":
        return Sym3Diff(*(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rmul__(self, s) -> "Sym3Diff":
        if isinstance(s, (Series2, Number)):
            return Sym3Diff(*(c * s for c in self.coeffs))
        return NotImplemented

    def truncate(self, n: int) -> "Sym3Diff":
        return Sym3Diff(*(c.truncate(n) for c in self.coeffs))

    def at_origin(self) -> np.ndarray:
        return np.array([c.constant for c in self.coeffs])

    @classmethod
    def from_ab(cls, a: Series2, b: Series2) -> "Sym3Diff":
        """``(a dz + b dw) dz dw``."""
        n = min(a.max_order, b.max_order)
        return cls(Series2.zero(n), a, b, Series2.zero(n))


def wedge(u: OneForm, v: OneForm) -> TwoForm:
    return TwoForm(u.p * v.q - u.q * v.p)


def exterior_d(u: OneForm) -> TwoForm:
    return TwoForm(partial(u.q, Z) - partial(u.p, W))


def grad(h: Series2) -> OneForm:
    return OneForm(partial(h, Z), partial(h, W))


def ratio2(num: TwoForm, den: TwoForm, unit_tol: float = UNIT_TOL) -> Series2:
    """The function ``num / den``; ``den`` must be nonvanishing at the origin."""
    return num.r * invert(den.r, unit_tol)


def scale_form(s: Series2, u: OneForm) -> OneForm:
    return OneForm(s * u.p, s * u.q)


def sym3_product(u: OneForm, v: OneForm, x: OneForm) -> Sym3Diff:
    pu, qu, pv, qv, px, qx = u.p, u.q, v.p, v.q, x.p, x.q
    return Sym3Diff(
        pu * pv * px,
        pu * pv * qx + pu * qv * px + qu * pv * px,
        pu * qv * qx + qu * pv * qx + qu * qv * px,
        qu * qv * qx,
    )


def discriminant(eta: Sym3Diff) -> Series2:
    c0, c1, c2, c3 = eta.coeffs
    return (
        18 * (c0 * c1 * c2 * c3)
        - 4 * (c1 * c1 * c1 * c3)
        + c1 * c1 * c2 * c2
        - 4 * (c0 * c2 * c2 * c2)
        - 27 * (c0 * c0 * c3 * c3)
    )


def is_nondegenerate(eta: Sym3Diff, unit_tol: float = UNIT_TOL) -> bool:
    """Three distinct tangent lines at the origin (scale-aware)."""
    scale = max(1.0, float(np.abs(eta.at_origin()).max()))
    return abs(discriminant(eta).constant) > unit_tol * scale**4


def pullback_sym3(eta: Sym3Diff, z_of: Series2, w_of: Series2,
                  unit_tol: float = UNIT_TOL) -> Sym3Diff:
    """Substitute ``z = z_of(u, v)``, ``w = w_of(u, v)``; result in ``(du, dv)``."""
    jac = linear_part(z_of, w_of)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if abs(det) <= unit_tol * max(1.0, float(np.abs(jac).max()) ** 2):
        raise SingularJacobian(f"Jacobian determinant {det!r} at the origin")
    dz, dw = grad(z_of), grad(w_of)
    c = [compose(ci, z_of, w_of, unit_tol) for ci in eta.coeffs]
    basis = (
        sym3_product(dz, dz, dz),
        sym3_product(dz, dz, dw),
        sym3_product(dz, dw, dw),
        sym3_product(dw, dw, dw),
    )
    out = c[0] * basis[0]
    for ci, b in zip(c[1:], basis[1:]):
        out = out + ci * b
    return out
