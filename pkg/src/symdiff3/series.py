"""Truncated bivariate power series with complex coefficients.

A :class:`Series2` stores the coefficients of ``z**i * w**j`` for all
``i + j <= max_order`` in a dense square array.  Every series also carries a
``valid_order``: the largest total degree through which its coefficients are
known to be exact.  Derivatives lower it by one, products and sums take the
minimum of their inputs, so a residual that vanishes "to valid order" is a
sound statement about the underlying germ.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from numbers import Number
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    NonzeroConstantTerm,
    NotAUnit,
    OrderExceedsValid,
    SingularJacobian,
)

UNIT_TOL = 1e-12

Z = "z"
W = "w"


@lru_cache(maxsize=None)
def _triangle(n: int) -> np.ndarray:
    i, j = np.indices((n + 1, n + 1))
    mask = i + j <= n
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=None)
def _degrees(n: int) -> np.ndarray:
    i, j = np.indices((n + 1, n + 1))
    deg = i + j
    deg.setflags(write=False)
    return deg


class Series2:
    """Immutable truncated power series in ``z`` and ``w``."""

    __slots__ = ("coeffs", "max_order", "valid_order")

    def __init__(self, coeffs, max_order: int | None = None, valid_order: int | None = None):
        arr = np.array(coeffs, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("coefficient array must be two-dimensional")
        if max_order is None:
            max_order = max(arr.shape) - 1
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        n = max_order
        out = np.zeros((n + 1, n + 1), dtype=complex)
        r, c = min(arr.shape[0], n + 1), min(arr.shape[1], n + 1)
        out[:r, :c] = arr[:r, :c]
        out[~_triangle(n)] = 0
        if not np.all(np.isfinite(out)):
            raise ValueError("series coefficients must be finite")
        out.setflags(write=False)
        if valid_order is None:
            valid_order = n
        self.coeffs = out
        self.max_order = n
        self.valid_order = max(0, min(int(valid_order), n))

    # construction

    @classmethod
    def _raw(cls, arr: np.ndarray, n: int, v: int) -> "Series2":
        # arr must already be (n+1, n+1) and zero outside the triangle
        obj = cls.__new__(cls)
        arr.setflags(write=False)
        obj.coeffs = arr
        obj.max_order = n
        obj.valid_order = max(0, min(v, n))
        return obj

    @classmethod
    def zero(cls, n: int) -> "Series2":
        return cls._raw(np.zeros((n + 1, n + 1), dtype=complex), n, n)

    @classmethod
    def const(cls, value: complex, n: int) -> "Series2":
        arr = np.zeros((n + 1, n + 1), dtype=complex)
        arr[0, 0] = value
        return cls._raw(arr, n, n)

    @classmethod
    def var(cls, name: str, n: int) -> "Series2":
        arr = np.zeros((n + 1, n + 1), dtype=complex)
        if n >= 1:
            arr[(1, 0) if name == Z else (0, 1)] = 1
        return cls._raw(arr, n, n)

    @classmethod
    def monomial(cls, i: int, j: int, n: int, coeff: complex = 1) -> "Series2":
        arr = np.zeros((n + 1, n + 1), dtype=complex)
        if i + j <= n:
            arr[i, j] = coeff
        return cls._raw(arr, n, n)

    @classmethod
    def from_dict(cls, terms: Mapping[tuple[int, int], complex], n: int,
                  valid_order: int | None = None) -> "Series2":
        arr = np.zeros((n + 1, n + 1), dtype=complex)
        for (i, j), c in terms.items():
            if i + j <= n:
                arr[i, j] += c
        return cls(arr, n, valid_order)

    # inspection

    def __getitem__(self, ij: tuple[int, int]) -> complex:
        i, j = ij
        if i < 0 or j < 0 or i + j > self.max_order:
            return 0j
        return complex(self.coeffs[i, j])

    @property
    def constant(self) -> complex:
        return complex(self.coeffs[0, 0])

    def terms(self, up_to: int | None = None) -> Iterable[tuple[int, int, complex]]:
        """Nonzero ``(i, j, coeff)`` triples in graded order."""
        top = self.max_order if up_to is None else up_to
        for d in range(top + 1):
            for i in range(d, -1, -1):
                c = self.coeffs[i, d - i]
                if c != 0:
                    yield i, d - i, complex(c)

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.6g})*z^{i}*w^{j}" for i, j, c in self.terms()) or "0"
        return f"Series2({body}; N={self.max_order}, v={self.valid_order})"

    # arithmetic

    def _coerce(self, other) -> "Series2":
        if isinstance(other, Series2):
            return other
        if isinstance(other, Number):
            return Series2.const(complex(other), self.max_order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        s, t = _align(self, other)
        return Series2._raw(s.coeffs + t.coeffs, s.max_order, min(s.valid_order, t.valid_order))

    __radd__ = __add__

    def __neg__(self) -> "Series2":
        return Series2._raw(-self.coeffs, self.max_order, self.valid_order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return Series2._raw(self.coeffs * complex(other), self.max_order, self.valid_order)
        if not isinstance(other, Series2):
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1 / complex(other))
        if not isinstance(other, Series2):
            return NotImplemented
        return mul(self, invert(other))

    def __rtruediv__(self, other):
        if isinstance(other, Number):
            return invert(self) * complex(other)
        return NotImplemented

    def __pow__(self, k: int) -> "Series2":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = Series2.const(1, self.max_order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series2):
            return NotImplemented
        s, t = _align(self, other)
        v = min(s.valid_order, t.valid_order)
        mask = _degrees(s.max_order) <= v
        return bool(np.array_equal(s.coeffs[mask], t.coeffs[mask]))

    __hash__ = None  # type: ignore[assignment]

    def isclose(self, other, tol: float = 1e-9) -> bool:
        """Coefficientwise ``|self - other| <= tol`` over trusted degrees."""
        diff = self - other
        return max_abs_coeff(diff, diff.valid_order) <= tol

    # convenience wrappers

    def dz(self) -> "Series2":
        return partial(self, Z)

    def dw(self) -> "Series2":
        return partial(self, W)

    def transpose(self) -> "Series2":
        """Swap the roles of ``z`` and ``w``."""
        return Series2._raw(self.coeffs.T.copy(), self.max_order, self.valid_order)

    def with_valid_order(self, v: int) -> "Series2":
        return Series2._raw(self.coeffs.copy(), self.max_order, v)

    def truncate(self, n: int) -> "Series2":
        """Drop everything above total degree ``n``."""
        if n >= self.max_order:
            return self
        return Series2._raw(self.coeffs[: n + 1, : n + 1] * _triangle(n), n, min(self.valid_order, n))

    def __call__(self, z: complex, w: complex) -> complex:
        return evaluate(self, z, w)


def _align(s: Series2, t: Series2) -> tuple[Series2, Series2]:
    if s.max_order == t.max_order:
        return s, t
    n = min(s.max_order, t.max_order)
    return s.truncate(n), t.truncate(n)


@lru_cache(maxsize=None)
def _product_plan(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # flat indices of every monomial pair whose product survives truncation
    idx = [(i, j) for i in range(n + 1) for j in range(n + 1 - i)]
    left, right, target = [], [], []
    for i1, j1 in idx:
        for i2, j2 in idx:
            if i1 + j1 + i2 + j2 <= n:
                left.append(i1 * (n + 1) + j1)
                right.append(i2 * (n + 1) + j2)
                target.append((i1 + i2) * (n + 1) + j1 + j2)
    return np.array(left), np.array(right), np.array(target)


def mul(s: Series2, t: Series2) -> Series2:
    """Cauchy product truncated to total degree ``max_order``."""
    s, t = _align(s, t)
    n = s.max_order
    left, right, target = _product_plan(n)
    prod = s.coeffs.ravel()[left] * t.coeffs.ravel()[right]
    size = (n + 1) ** 2
    out = np.bincount(target, prod.real, size) + 1j * np.bincount(target, prod.imag, size)
    return Series2._raw(out.reshape(n + 1, n + 1), n, min(s.valid_order, t.valid_order))


def _unit_split(s: Series2, unit_tol: float) -> tuple[complex, Series2]:
    s0 = s.constant
    if abs(s0) <= unit_tol:
        raise NotAUnit(f"constant coefficient {s0!r} is not a unit")
    return s0, s / s0 - 1


def _nilpotent_sum(e: Series2, coeffs: list[complex]) -> Series2:
    # sum_k coeffs[k] * e**k by Horner; e has zero constant term so k <= N suffices
    out = Series2.const(coeffs[-1], e.max_order)
    for c in reversed(coeffs[:-1]):
        out = out * e + c
    return out.with_valid_order(e.valid_order)


def invert(s: Series2, unit_tol: float = UNIT_TOL) -> Series2:
    s0, e = _unit_split(s, unit_tol)
    n = s.max_order
    return _nilpotent_sum(e, [(-1) ** k / s0 for k in range(n + 1)])


def log_unit(s: Series2, unit_tol: float = UNIT_TOL) -> Series2:
    """Principal-branch logarithm of a unit series."""
    s0, e = _unit_split(s, unit_tol)
    n = s.max_order
    coeffs = [cmath.log(s0)] + [(-1) ** (k + 1) / k for k in range(1, n + 1)]
    return _nilpotent_sum(e, coeffs)


def exp_series(s: Series2) -> Series2:
    n = s.max_order
    s0 = s.constant
    e = s - s0
    scale = cmath.exp(s0)
    return _nilpotent_sum(e, [scale / math.factorial(k) for k in range(n + 1)])


def cube_root_unit(s: Series2, unit_tol: float = UNIT_TOL) -> Series2:
    """Cube root whose constant term is the principal cube root of ``s(0,0)``."""
    s0, e = _unit_split(s, unit_tol)
    n = s.max_order
    root0 = cmath.exp(cmath.log(s0) / 3)
    coeffs = []
    binom = 1.0
    for k in range(n + 1):
        coeffs.append(root0 * binom)
        binom *= (1 / 3 - k) / (k + 1)
    return _nilpotent_sum(e, coeffs)


def partial(s: Series2, direction: str) -> Series2:
    n = s.max_order
    out = np.zeros_like(s.coeffs)
    if n >= 1:
        if direction == Z:
            out[:-1, :] = s.coeffs[1:, :] * np.arange(1, n + 1)[:, None]
        elif direction == W:
            out[:, :-1] = s.coeffs[:, 1:] * np.arange(1, n + 1)[None, :]
        else:
            raise ValueError(f"unknown direction {direction!r}")
    return Series2._raw(out, n, s.valid_order - 1)


def antiderivative(s: Series2, direction: str) -> Series2:
    """Term-by-term antiderivative with zero constant of integration."""
    n = s.max_order
    out = np.zeros_like(s.coeffs)
    if n >= 1:
        if direction == Z:
            out[1:, :] = s.coeffs[:-1, :] / np.arange(1, n + 1)[:, None]
        elif direction == W:
            out[:, 1:] = s.coeffs[:, :-1] / np.arange(1, n + 1)[None, :]
        else:
            raise ValueError(f"unknown direction {direction!r}")
        out[~_triangle(n)] = 0
    return Series2._raw(out, n, min(s.valid_order + 1, n))


def evaluate(s: Series2, z: complex, w: complex) -> complex:
    """Evaluate the truncated polynomial at ``(z, w)``."""
    k = np.arange(s.max_order + 1)
    zp = np.power(complex(z), k)
    wp = np.power(complex(w), k)
    return complex(zp @ s.coeffs @ wp)


def compose(s: Series2, u: Series2, v: Series2, unit_tol: float = UNIT_TOL) -> Series2:
    """Substitute ``z -> u(z, w)``, ``w -> v(z, w)`` into ``s``."""
    if abs(u.constant) > unit_tol or abs(v.constant) > unit_tol:
        raise NonzeroConstantTerm("substituted series must vanish at the origin")
    n = min(s.max_order, u.max_order, v.max_order)
    s, u, v = s.truncate(n), u.truncate(n), v.truncate(n)
    u = _drop_constant(u)
    v = _drop_constant(v)
    # v_pows[j] = v**j, stacked for cheap linear combinations
    v_pows = np.empty((n + 1, n + 1, n + 1), dtype=complex)
    vp = Series2.const(1, n)
    for j in range(n + 1):
        v_pows[j] = vp.coeffs
        if j < n:
            vp = vp * v
    out = None
    for i in range(n, -1, -1):
        inner = Series2._raw(np.tensordot(s.coeffs[i, :], v_pows, axes=1), n, n)
        out = inner if out is None else out * u + inner
    v_out = min(s.valid_order, u.valid_order, v.valid_order)
    return out.with_valid_order(v_out)


def _drop_constant(s: Series2) -> Series2:
    if s.coeffs[0, 0] == 0:
        return s
    arr = s.coeffs.copy()
    arr[0, 0] = 0
    return Series2._raw(arr, s.max_order, s.valid_order)


def linear_part(u: Series2, v: Series2) -> np.ndarray:
    """Jacobian of the map ``(u, v)`` at the origin."""
    return np.array([[u[1, 0], u[0, 1]], [v[1, 0], v[0, 1]]], dtype=complex)


def invert_map(u: Series2, v: Series2, unit_tol: float = UNIT_TOL) -> tuple[Series2, Series2]:
    """Inverse of the germ ``(z, w) -> (u, v)``.

    Solves ``u(p, q) = z, v(p, q) = w`` by chord iteration with the Jacobian
    frozen at the origin; each sweep fixes one more total degree.
    """
    if abs(u.constant) > unit_tol or abs(v.constant) > unit_tol:
        raise NonzeroConstantTerm("map must fix the origin")
    n = min(u.max_order, v.max_order)
    u, v = _drop_constant(u.truncate(n)), _drop_constant(v.truncate(n))
    jac = linear_part(u, v)
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    if abs(det) <= unit_tol * max(1.0, float(np.abs(jac).max()) ** 2):
        raise SingularJacobian(f"Jacobian determinant {det!r} at the origin")
    inv = np.linalg.inv(jac)
    z, w = Series2.var(Z, n), Series2.var(W, n)
    p = z * inv[0, 0] + w * inv[0, 1]
    q = z * inv[1, 0] + w * inv[1, 1]
    for _ in range(max(n - 1, 0)):
        eu = compose(u, p, q) - z
        ev = compose(v, p, q) - w
        p = p - (eu * inv[0, 0] + ev * inv[0, 1])
        q = q - (eu * inv[1, 0] + ev * inv[1, 1])
    v_out = min(u.valid_order, v.valid_order)
    return p.with_valid_order(v_out), q.with_valid_order(v_out)


def max_abs_coeff(s: Series2, up_to: int) -> float:
    if up_to > s.valid_order:
        raise OrderExceedsValid(f"degree {up_to} exceeds valid order {s.valid_order}")
    mask = _degrees(s.max_order) <= up_to
    vals = np.abs(s.coeffs[mask])
    return float(vals.max()) if vals.size else 0.0


def first_nonzero_degree(s: Series2, tol: float, up_to: int | None = None) -> int | None:
    """Lowest total degree carrying a coefficient of modulus above ``tol``."""
    top = s.valid_order if up_to is None else up_to
    deg = _degrees(s.max_order)
    big = (np.abs(s.coeffs) > tol) & (deg <= top)
    if not big.any():
        return None
    return int(deg[big].min())


def degree_norms(s: Series2, up_to: int) -> np.ndarray:
    """Largest coefficient modulus in each total degree ``0..up_to``."""
    if up_to > s.valid_order:
        raise OrderExceedsValid(f"degree {up_to} exceeds valid order {s.valid_order}")
    deg = _degrees(s.max_order)
    out = np.zeros(up_to + 1)
    np.maximum.at(out, deg[deg <= up_to], np.abs(s.coeffs[deg <= up_to]))
    return out


def scale_of(*series: Series2) -> float:
    """``max(1, largest coefficient modulus)`` over trusted degrees."""
    m = 1.0
    for s in series:
        m = max(m, max_abs_coeff(s, s.valid_order))
    return m
