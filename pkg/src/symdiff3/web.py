"""The 3-web of a non-degenerate symmetric 3-differential.

Pipeline: factor the cubic into three root germs (Cardano at the origin, then
Newton/Hensel lifting in the series ring), build the normalized frame
``w1 + w2 + w3 = 0`` with ``w1 w2 w3 = eta``, and read off the web invariants
``Omega``, ``h_i``, ``gamma`` and the Blaschke curvature ``d gamma``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    Degenerate,
    DegenerateForm,
    NotAdapted,
    ShapeViolation,
    ZeroCubic,
)
from .exterior import (
    OneForm,
    Sym3Diff,
    TwoForm,
    exterior_d,
    is_nondegenerate,
    pullback_sym3,
    ratio2,
    scale_form,
    sym3_product,
    wedge,
)
from .series import (
    UNIT_TOL,
    W,
    Z,
    Series2,
    cube_root_unit,
    invert,
    invert_map,
    log_unit,
    max_abs_coeff,
    partial,
    scale_of,
)

SLOPE = "slope"  # form s dz - dw, root of c0 + c1 s + c2 s^2 + c3 s^3
INVERSE = "inverse"  # form dz - t dw, root of c3 + c2 t + c1 t^2 + c0 t^3

CUBE_ROOTS_OF_UNITY = tuple(cmath.exp(2j * math.pi * k / 3) for k in range(3))


# ---------------------------------------------------------------- base point


def solve_cubic(a: complex, b: complex, c: complex, d: complex) -> list[complex]:
    """Roots of ``a x^3 + b x^2 + c x + d`` (``a != 0``) by Cardano's formula."""
    d0 = b * b - 3 * a * c
    d1 = 2 * b**3 - 9 * a * b * c + 27 * a * a * d
    sq = cmath.sqrt(d1 * d1 - 4 * d0**3)
    big = d1 + sq if abs(d1 + sq) >= abs(d1 - sq) else d1 - sq
    if abs(big) == 0:
        return [-b / (3 * a)] * 3
    cc = cmath.exp(cmath.log(big / 2) / 3)
    roots = []
    for zeta in CUBE_ROOTS_OF_UNITY:
        ck = zeta * cc
        roots.append(-(b + ck + d0 / ck) / (3 * a))
    return roots


def _solve_low(coeffs: list[complex], tol: float) -> tuple[list[complex], int]:
    """Roots of ``sum coeffs[k] x^k`` (degree <= 3) plus the count at infinity."""
    deg = 3
    while deg > 0 and abs(coeffs[deg]) <= tol:
        deg -= 1
    at_inf = 3 - deg
    c = coeffs
    if deg == 3:
        roots = solve_cubic(c[3], c[2], c[1], c[0])
    elif deg == 2:
        sq = cmath.sqrt(c[1] * c[1] - 4 * c[2] * c[0])
        den = -c[1] - sq if abs(-c[1] - sq) >= abs(-c[1] + sq) else -c[1] + sq
        # numerically stable pair
        r1 = den / (2 * c[2])
        r2 = (2 * c[0]) / den if den != 0 else -c[1] / (2 * c[2])
        roots = [r1, r2]
    elif deg == 1:
        roots = [-c[0] / c[1]]
    else:
        roots = []
    return roots, at_inf


def _polish(coeffs: list[complex], x: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        f = ((coeffs[3] * x + coeffs[2]) * x + coeffs[1]) * x + coeffs[0]
        df = (3 * coeffs[3] * x + 2 * coeffs[2]) * x + coeffs[1]
        if df == 0:
            break
        x = x - f / df
    return x


def base_roots(c: np.ndarray, tol: float = UNIT_TOL) -> list[tuple[str, complex]]:
    """The three tangent directions at the origin as ``(chart, value)`` pairs.

    Each root is placed in the chart where its value has modulus at most one.
    Ordered by argument then modulus of the slope; the ``dz`` direction
    (infinite slope) goes last.
    """
    c = [complex(x) for x in c]
    scale = max(abs(x) for x in c)
    if scale == 0:
        raise ZeroCubic("cubic vanishes at the origin")
    in_slope = abs(c[3]) >= abs(c[0])
    poly = c if in_slope else c[::-1]
    roots, at_inf = _solve_low(poly, tol * scale)
    primary, other = (SLOPE, INVERSE) if in_slope else (INVERSE, SLOPE)
    found = []
    for r in roots:
        if abs(r) <= 1:
            found.append((primary, r))
        else:
            found.append((other, 1 / r))
    found += [(other, 0j)] * at_inf
    polished = []
    for chart, x in found:
        cs = c if chart == SLOPE else c[::-1]
        polished.append((chart, _polish(cs, x)))
    polished.sort(key=_direction_key)
    return polished


def _direction_key(root: tuple[str, complex]):
    chart, x = root
    if chart == INVERSE and abs(x) <= 1e-14:
        return (1, 0.0, 0.0)
    slope = x if chart == SLOPE else 1 / x
    if abs(slope) <= 1e-12:
        arg = 0.0
    else:
        arg = cmath.phase(slope) % (2 * math.pi)
        if 2 * math.pi - arg < 1e-9:
            arg = 0.0
    return (0, round(arg, 9), abs(slope))


# ---------------------------------------------------------------- root germs


@dataclass(frozen=True, eq=False)
class RootGerm:
    chart: str
    value: Series2

    def form(self) -> OneForm:
        n = self.value.max_order
        one = Series2.const(1, n)
        if self.chart == SLOPE:
            return OneForm(self.value, -one)
        return OneForm(one, -self.value)


@dataclass(frozen=True, eq=False)
class RootTriple:
    roots: tuple[RootGerm, RootGerm, RootGerm]

    def permuted(self, perm) -> "RootTriple":
        return RootTriple(tuple(self.roots[i] for i in perm))

    def forms(self) -> tuple[OneForm, OneForm, OneForm]:
        return tuple(r.form() for r in self.roots)


def _hensel(coeffs: tuple[Series2, ...], x0: complex, unit_tol: float) -> Series2:
    n = coeffs[0].max_order
    v = min(c.valid_order for c in coeffs)
    x = Series2.const(x0, n)
    c0, c1, c2, c3 = coeffs
    # Newton doubles the number of correct degrees per step
    for _ in range(max(1, math.ceil(math.log2(n + 2))) + 1):
        f = c0 + x * (c1 + x * (c2 + x * c3))
        df = c1 + x * (2 * c2 + x * (3 * c3))
        x = x - f * invert(df, unit_tol)
    return x.with_valid_order(v)


def factor_roots(eta: Sym3Diff, unit_tol: float = UNIT_TOL) -> RootTriple:
    """Lift the three base-point tangent directions of ``eta`` to root germs."""
    c_at0 = eta.at_origin()
    if not np.any(np.abs(c_at0) > 0):
        raise ZeroCubic("cubic vanishes at the origin")
    if not is_nondegenerate(eta, unit_tol):
        raise Degenerate("discriminant vanishes at the origin")
    germs = []
    for chart, x0 in base_roots(c_at0, unit_tol):
        cs = eta.coeffs if chart == SLOPE else eta.coeffs[::-1]
        germs.append(RootGerm(chart, _hensel(cs, x0, unit_tol)))
    return RootTriple(tuple(germs))


# ---------------------------------------------------------------- the frame


@dataclass(frozen=True, eq=False)
class WebFrame:
    omega: tuple[OneForm, OneForm, OneForm]
    Omega: TwoForm
    h: tuple[Series2, Series2, Series2]
    gamma: OneForm
    d_gamma: TwoForm

    @property
    def max_order(self) -> int:
        return self.omega[0].max_order

    def permuted(self, perm) -> "WebFrame":
        return web_frame(tuple(self.omega[i] for i in perm))

    def rephased(self, k: int) -> "WebFrame":
        """Multiply every form by the ``k``-th power of a primitive cube root of unity."""
        zeta = CUBE_ROOTS_OF_UNITY[k % 3]
        return web_frame(tuple(zeta * w for w in self.omega))

    def eta(self) -> Sym3Diff:
        return sym3_product(*self.omega)


def web_frame(omega, unit_tol: float = UNIT_TOL) -> WebFrame:
    """Web invariants of a normalized triple ``w1 + w2 + w3 = 0``."""
    w1, w2, w3 = omega
    Omega = wedge(w1, w2)
    if abs(Omega.r.constant) <= unit_tol:
        raise Degenerate("w1 ^ w2 vanishes at the origin")
    h = tuple(ratio2(exterior_d(w), Omega, unit_tol) for w in omega)
    gamma = scale_form(h[1], w1) - scale_form(h[0], w2)
    return WebFrame((w1, w2, w3), Omega, h, gamma, exterior_d(gamma))


def normalize_web(eta: Sym3Diff, roots: RootTriple, unit_tol: float = UNIT_TOL) -> WebFrame:
    lam1, lam2, lam3 = roots.forms()
    prod = sym3_product(lam1, lam2, lam3)
    m = int(np.argmax(np.abs(prod.at_origin())))
    k = eta.coeffs[m] * invert(prod.coeffs[m], unit_tol)
    lam1 = scale_form(k, lam1)
    # lam3 = x lam1 + y lam2, so -x lam1 - y lam2 + lam3 = 0
    det = wedge(lam1, lam2).r
    if abs(det.constant) <= unit_tol:
        raise Degenerate("root forms are proportional at the origin")
    inv_det = invert(det, unit_tol)
    x = (lam3.p * lam2.q - lam2.p * lam3.q) * inv_det
    y = (lam1.p * lam3.q - lam3.p * lam1.q) * inv_det
    c = (-x, -y, Series2.const(1, x.max_order))
    kappa = cube_root_unit(invert(c[0] * c[1], unit_tol), unit_tol)
    omega = tuple(scale_form(kappa * ci, lam) for ci, lam in zip(c, (lam1, lam2, lam3)))
    return web_frame(omega, unit_tol)


def build_frame(eta: Sym3Diff, unit_tol: float = UNIT_TOL) -> WebFrame:
    return normalize_web(eta, factor_roots(eta, unit_tol), unit_tol)


def frame_residuals(frame: WebFrame, eta: Sym3Diff | None = None) -> dict[str, float]:
    """Max coefficient residual of each frame invariant over its trusted degrees."""
    w = frame.omega
    out = {}

    def norm(*series):
        return max(max_abs_coeff(s, s.valid_order) for s in series)

    total = w[0] + w[1] + w[2]
    out["sum_zero"] = norm(total.p, total.q)
    if eta is not None:
        diff = frame.eta() - eta
        out["product"] = norm(*diff.coeffs)
    out["Omega_23"] = norm((wedge(w[1], w[2]) - frame.Omega).r)
    out["Omega_31"] = norm((wedge(w[2], w[0]) - frame.Omega).r)
    out["h_sum"] = norm(frame.h[0] + frame.h[1] + frame.h[2])
    for i in range(3):
        dw_i = exterior_d(w[i])
        out[f"d_omega{i + 1}_h"] = norm((dw_i - frame.h[i] * frame.Omega).r)
        out[f"d_omega{i + 1}_gamma"] = norm((dw_i - wedge(frame.gamma, w[i])).r)
    return out


# ---------------------------------------------------------------- first integrals


def first_integral(u: OneForm, unit_tol: float = UNIT_TOL) -> Series2:
    """A function ``h`` with ``h(0) = 0`` and ``dh ^ u = 0``.

    Normalized so that the derivative in the dominant coframe direction is one
    at the origin.
    """
    p0, q0 = abs(u.p.constant), abs(u.q.constant)
    if max(p0, q0) <= unit_tol:
        raise DegenerateForm("1-form vanishes at the origin")
    if p0 > q0:
        return _first_integral_w(OneForm(u.q.transpose(), u.p.transpose()), unit_tol).transpose()
    return _first_integral_w(u, unit_tol)


def _first_integral_w(u: OneForm, unit_tol: float) -> Series2:
    # h = w + sum_k h_k(w) z^k with h_z = (p/q) h_w, solved row by row in z
    n = u.max_order
    r = u.p * invert(u.q, unit_tol)
    arr = np.zeros((n + 1, n + 1), dtype=complex)
    if n >= 1:
        arr[0, 1] = 1
    for k in range(n):
        h = Series2(arr, n)
        row = (r * partial(h, W)).coeffs[k, :]
        arr[k + 1, : n - k] = row[: n - k] / (k + 1)
    return Series2(arr, n, u.valid_order)


@dataclass(frozen=True, eq=False)
class AdaptedChart:
    """``eta`` rewritten as ``(a du + b dv) du dv`` in first-integral coordinates."""

    eta: Sym3Diff
    a: Series2
    b: Series2
    forward: tuple[Series2, Series2]  # (u, v) as functions of (z, w)
    inverse: tuple[Series2, Series2]  # (z, w) as functions of (u, v)
    shape_residual: float


def _pick_dz_dw(frame: WebFrame) -> tuple[int, int]:
    def ratio(form, which):
        p, q = abs(form.p.constant), abs(form.q.constant)
        return (p if which == 0 else q) / (p + q)

    i = max(range(3), key=lambda k: ratio(frame.omega[k], 0))
    j = max((k for k in range(3) if k != i), key=lambda k: ratio(frame.omega[k], 1))
    return i, j


def adapt_coordinates(eta: Sym3Diff, frame: WebFrame, tol: float = 1e-9,
                      unit_tol: float = UNIT_TOL) -> AdaptedChart:
    """Integrate two web foliations to coordinates in which ``eta`` has no
    ``du^3`` or ``dv^3`` term."""
    i, j = _pick_dz_dw(frame)
    u = first_integral(frame.omega[i], unit_tol)
    v = first_integral(frame.omega[j], unit_tol)
    zu, wu = invert_map(u, v, unit_tol)
    pulled = pullback_sym3(eta, zu, wu, unit_tol)
    v_out = pulled.valid_order
    shape = max(max_abs_coeff(pulled.c0, v_out), max_abs_coeff(pulled.c3, v_out))
    if shape > tol * scale_of(*eta.coeffs):
        raise ShapeViolation(f"adapted cubic keeps pure terms of size {shape:.3g}")
    n = pulled.max_order
    clean = Sym3Diff(Series2.zero(n).with_valid_order(v_out), pulled.c1, pulled.c2,
                     Series2.zero(n).with_valid_order(v_out))
    return AdaptedChart(clean, pulled.c1, pulled.c2, (u, v), (zu, wu), shape)


# ---------------------------------------------------------------- adapted frames


@dataclass(frozen=True, eq=False)
class AdaptedWebData:
    """``w1 = f dz``, ``w2 = g dw`` with ``F = (log f)_zw`` and ``G = (log g)_zw``."""

    f: Series2
    g: Series2
    F: Series2
    G: Series2


def adapted_frame(eta: Sym3Diff, unit_tol: float = UNIT_TOL) -> WebFrame:
    """The normalized frame of ``eta`` reordered so that ``w1 ~ dz``, ``w2 ~ dw``.

    Only possible when ``eta`` has no ``dz^3`` and ``dw^3`` terms.
    """
    frame = build_frame(eta, unit_tol)
    for perm in itertools.permutations(range(3)):
        cand = frame.permuted(perm)
        if _is_adapted(cand):
            return cand
    raise NotAdapted("no frame ordering has w1 ~ dz and w2 ~ dw")


def _is_adapted(frame: WebFrame, tol: float = 1e-12) -> bool:
    w1, w2 = frame.omega[0], frame.omega[1]
    return (max_abs_coeff(w1.q, w1.q.valid_order) <= tol
            and max_abs_coeff(w2.p, w2.p.valid_order) <= tol)


def adapted_data(frame: WebFrame, unit_tol: float = UNIT_TOL) -> AdaptedWebData:
    if not _is_adapted(frame):
        raise NotAdapted("frame is not of the form (f dz, g dw, -f dz - g dw)")
    f, g = frame.omega[0].p, frame.omega[1].q
    F = partial(partial(log_unit(f, unit_tol), Z), W)
    G = partial(partial(log_unit(g, unit_tol), Z), W)
    return AdaptedWebData(f, g, F, G)


def frame_from_fg(f: Series2, g: Series2, unit_tol: float = UNIT_TOL) -> WebFrame:
    w1 = OneForm(f, Series2.zero(f.max_order).with_valid_order(f.valid_order))
    w2 = OneForm(Series2.zero(g.max_order).with_valid_order(g.valid_order), g)
    return web_frame((w1, w2, -(w1 + w2)), unit_tol)


def blaschke_at_origin(frame: WebFrame) -> complex:
    return frame.d_gamma.r.constant

