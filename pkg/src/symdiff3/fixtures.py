"""Named fixtures and seeded random generators.

Closed examples are produced by running the decomposition backwards: pick
``Z(z)``, ``W(w)``, ``H(z, w)`` and set ``a = Z W H_z``, ``b = Z W H_w``.
"""

from __future__ import annotations

import numpy as np

from .errors import GenerationFailed
from .exterior import Sym3Diff, is_nondegenerate
from .series import W, Z, Series2, log_unit, partial

DEFAULT_ORDER = 12


def _vars(n: int) -> tuple[Series2, Series2]:
    return Series2.var(Z, n), Series2.var(W, n)


def fixture_c(n: int = DEFAULT_ORDER) -> tuple[Series2, Series2]:
    """Closed: ``H = z + w + z^2 w/2 - z w^2/2`` with ``Z = W = 1``."""
    z, w = _vars(n)
    return 1 + z * w - 0.5 * w * w, 1 + 0.5 * z * z - z * w


def fixture_c_potential(n: int = DEFAULT_ORDER) -> Series2:
    z, w = _vars(n)
    return z + w + 0.5 * z * z * w - 0.5 * z * w * w


def fixture_w(n: int = DEFAULT_ORDER) -> tuple[Series2, Series2]:
    """Not closed: the web of ``(1+zw) dz``, ``dw``, ``-(1+zw) dz - dw``."""
    z, w = _vars(n)
    return -((1 + z * w) ** 2), -(1 + z * w)


def fixture_k(n: int = DEFAULT_ORDER) -> tuple[Series2, Series2]:
    """Constant coefficients: closed, with vanishing Blaschke curvature."""
    return Series2.const(-1, n), Series2.const(-1, n)


def eta_of(ab: tuple[Series2, Series2]) -> Sym3Diff:
    return Sym3Diff.from_ab(*ab)


def _rand_complex(rng: np.random.Generator, scale: float, size=None):
    return scale * (rng.uniform(-1, 1, size) + 1j * rng.uniform(-1, 1, size))


def _random_poly(rng, n, degree_bound, scale, min_degree=1, only=None) -> Series2:
    terms = {}
    for d in range(min_degree, degree_bound + 1):
        for i in range(d + 1):
            j = d - i
            if only == Z and j:
                continue
            if only == W and i:
                continue
            terms[(i, j)] = _rand_complex(rng, scale)
    return Series2.from_dict(terms, n)


def blaschke_gap(a: Series2, b: Series2) -> complex:
    """``A(0,0) - B(0,0)`` with ``A = (log a)_zw`` and ``B = (log b)_zw``."""
    A = partial(partial(log_unit(a), Z), W)
    B = partial(partial(log_unit(b), Z), W)
    return A.constant - B.constant


def gen_closed(seed: int, order: int = DEFAULT_ORDER, degree_bound: int = 4,
               scale: float = 0.05, gap_scale: float = 1.0, max_tries: int = 100) -> tuple[Series2, Series2]:
    """Random closed ``(a, b)`` with ``|A(0,0) - B(0,0)| > 0.1``."""
    rng = np.random.default_rng(seed)
    n = order
    z, w = _vars(n)
    Zs = 1 + _random_poly(rng, n, degree_bound, scale, only=Z)
    Ws = 1 + _random_poly(rng, n, degree_bound, scale, only=W)
    H = z + w + _random_poly(rng, n, max(degree_bound, 3), scale, min_degree=2)
    for _ in range(max_tries):
        # the z^2 w and z w^2 terms of H control A - B at the origin
        arr = H.coeffs.copy()
        arr[2, 1], arr[1, 2] = _rand_complex(rng, gap_scale, 2)
        H = Series2(arr, n)
        a = Zs * Ws * partial(H, Z)
        b = Zs * Ws * partial(H, W)
        if abs(blaschke_gap(a, b)) > 0.1:
            return a, b
    raise GenerationFailed(f"no admissible draw for seed {seed}")


def gen_perturbed(seed: int, base: tuple[Series2, Series2], magnitude: float = 1.0,
                  degree_bound: int = 4) -> tuple[Series2, Series2]:
    """Add ``magnitude * e^{i theta} z^i w^j`` (``2 <= i + j <= degree_bound``) to
    ``a`` or ``b``."""
    rng = np.random.default_rng(seed)
    a, b = base
    n = a.max_order
    d = int(rng.integers(2, degree_bound + 1))
    i = int(rng.integers(0, d + 1))
    theta = rng.uniform(0, 2 * np.pi)
    bump = Series2.monomial(i, d - i, n, magnitude * np.exp(1j * theta))
    if rng.integers(0, 2) == 0:
        return a + bump, b
    return a, b + bump


def random_cubic(seed: int, order: int = DEFAULT_ORDER, degree_bound: int = 3,
                 scale: float = 0.1, min_discriminant: float = 0.5,
                 min_radius: float = 0.3, max_tries: int = 200) -> Sym3Diff:
    """A random non-degenerate cubic with nonvanishing Blaschke curvature.

    ``min_discriminant`` keeps the three base directions apart.  ``min_radius``
    bounds ``|dgamma(0)| / |d(dgamma)(0)|`` from below, a first-order estimate
    of the radius on which ``1/dgamma`` converges; the web 1-forms built from
    it lose digits at the rate that radius shrinks.
    """
    from .web import build_frame

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        cs = []
        for _k in range(4):
            c = _random_poly(rng, order, degree_bound, scale) + _rand_complex(rng, 1.0)
            cs.append(c)
        eta = Sym3Diff(*cs)
        if not is_nondegenerate(eta, min_discriminant):
            continue
        k = build_frame(eta).d_gamma.r
        k0, slope = abs(k.constant), abs(k[1, 0]) + abs(k[0, 1])
        if k0 > 0.05 and k0 >= min_radius * slope:
            return eta
    raise GenerationFailed(f"no admissible cubic for seed {seed}")


def random_units(seed: int, order: int = DEFAULT_ORDER, degree_bound: int = 4,
                 scale: float = 0.05, gap_scale: float = 0.5,
                 max_tries: int = 100) -> tuple[Series2, Series2]:
    """Random ``(f, g)`` whose adapted web has ``(F - G)(0,0)`` away from zero.

    Constant terms lie in the annulus ``0.7 <= |c| <= 1.3``; the ``zw``
    coefficients are drawn at ``gap_scale`` since they set ``F - G`` at the
    origin.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        units = []
        for _k in range(2):
            c0 = rng.uniform(0.7, 1.3) * np.exp(2j * np.pi * rng.uniform())
            u = c0 + _random_poly(rng, order, degree_bound, scale)
            arr = u.coeffs.copy()
            arr[1, 1] = _rand_complex(rng, gap_scale)
            units.append(Series2(arr, order))
        f, g = units
        gap = (partial(partial(log_unit(f), Z), W) - partial(partial(log_unit(g), Z), W)).constant
        if abs(gap) > 0.05:
            return f, g
    raise GenerationFailed(f"no admissible units for seed {seed}")


def random_coordinate_change(seed: int, order: int = DEFAULT_ORDER,
                             scale: float = 0.1, shear: float = 0.3) -> tuple[Series2, Series2]:
    """A random germ of biholomorphism fixing the origin, as ``(z(u,v), w(u,v))``."""
    rng = np.random.default_rng(seed)
    n = order
    z, w = _vars(n)
    while True:
        jac = np.eye(2) + _rand_complex(rng, shear, (2, 2))
        if abs(np.linalg.det(jac)) > 0.5:
            break
    zo = jac[0, 0] * z + jac[0, 1] * w + _random_poly(rng, n, 3, scale, min_degree=2)
    wo = jac[1, 0] * z + jac[1, 1] * w + _random_poly(rng, n, 3, scale, min_degree=2)
    return zo, wo


__all__ = [
    "DEFAULT_ORDER",
    "fixture_c",
    "fixture_c_potential",
    "fixture_w",
    "fixture_k",
    "eta_of",
    "blaschke_gap",
    "gen_closed",
    "gen_perturbed",
    "random_cubic",
    "random_units",
    "random_coordinate_change",
]
