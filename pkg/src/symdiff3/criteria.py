"""Closedness criteria for symmetric 3-differentials.

* :func:`thm1_evaluate` -- the PDE pair ``(xi/a)_z = A``, ``(xi/b)_w = B`` in
  coordinates where ``eta = (a dz + b dw) dz dw``.
* :func:`thm2_evaluate` -- closedness of ``beta_a - alpha`` and
  ``beta_s - gamma`` built from the web frame.
* :func:`oracle_decompose` -- brute-force search for ``c(w), d(z)`` with
  ``a_w - b_z = a c - b d``, followed by explicit integration of the closed
  factors.  Shares no formula with the other criteria.

The pair d(beta_a - alpha), d(beta_s - gamma) vanishes identically on every
frame (see ``tests/test_thm2_vacuous.py``), so :func:`is_closed` only uses it as
a necessary condition.  The frame equations of :func:`presym_evaluate` do carry
the information and are checked against the PDE residuals in
:func:`proof_crosschecks`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import BlaschkeFlat, Degenerate, InternalInconsistency, NotAUnit
from .exterior import (
    OneForm,
    Sym3Diff,
    TwoForm,
    exterior_d,
    grad,
    is_nondegenerate,
    ratio2,
    scale_form,
    wedge,
)
from .series import (
    UNIT_TOL,
    W,
    Z,
    Series2,
    antiderivative,
    exp_series,
    degree_norms,
    invert,
    log_unit,
    max_abs_coeff,
    partial,
    scale_of,
)
from .web import (
    AdaptedWebData,
    WebFrame,
    adapt_coordinates,
    build_frame,
)

RESIDUAL_TOL = 1e-9

CLOSED = "Closed"
NOT_CLOSED = "NotClosed"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class CriterionResult:
    name: str
    applicable: bool
    max_abs_residual: float | None = None
    first_nonzero_degree: int | None = None
    valid_order: int | None = None
    vanishes: bool | None = None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "max_abs_residual": self.max_abs_residual,
            "first_nonzero_degree": self.first_nonzero_degree,
            "valid_order": self.valid_order,
            "vanishes": self.vanishes,
            "note": self.note,
        }


def summarize(name: str, pairs, tol: float, scale: float) -> CriterionResult:
    """Reduce ``(lhs, rhs)`` series pairs to a verdict.

    Degree ``k`` of ``lhs - rhs`` vanishes when its largest coefficient is at
    most ``tol * max(scale, |lhs|_k, |rhs|_k)``.  Both sides grow like the
    Taylor coefficients of the input, and so does the rounding error in their
    difference; a flat threshold would flag high degrees of closed inputs.
    The reported ``max_abs_residual`` is the plain absolute maximum.
    """
    pairs = list(pairs)
    v = min(min(l.valid_order, r.valid_order) for l, r in pairs)
    worst = 0.0
    first = None
    for lhs, rhs in pairs:
        diff = degree_norms(lhs - rhs, v)
        ref = np.maximum(scale, np.maximum(degree_norms(lhs, v), degree_norms(rhs, v)))
        worst = max(worst, float(diff.max()))
        bad = np.flatnonzero(diff > tol * ref)
        if bad.size and (first is None or bad[0] < first):
            first = int(bad[0])
    return CriterionResult(
        name=name,
        applicable=True,
        max_abs_residual=worst,
        first_nonzero_degree=first,
        valid_order=v,
        vanishes=first is None,
    )


def _dzdw_log(s: Series2, unit_tol: float) -> Series2:
    return partial(partial(log_unit(s, unit_tol), Z), W)


# ---------------------------------------------------------------- coordinate PDE


@dataclass(frozen=True, eq=False)
class Thm1Data:
    a: Series2
    b: Series2
    A: Series2
    B: Series2
    xi: Series2
    r1: Series2
    r2: Series2

    def summary(self, tol: float = RESIDUAL_TOL) -> CriterionResult:
        # r1 = lhs1 - A, r2 = lhs2 - B
        pairs = ((self.r1 + self.A, self.A), (self.r2 + self.B, self.B))
        return summarize("thm1", pairs, tol, scale_of(self.a, self.b))


def thm1_evaluate(a: Series2, b: Series2, unit_tol: float = UNIT_TOL) -> Thm1Data:
    inv_a = invert(a, unit_tol)
    inv_b = invert(b, unit_tol)
    A = _dzdw_log(a, unit_tol)
    B = _dzdw_log(b, unit_tol)
    try:
        inv_diff = invert(A - B, unit_tol)
    except NotAUnit as exc:
        raise BlaschkeFlat("A - B vanishes at the origin") from exc
    xi = (a * partial(b * inv_a * B, Z) - b * partial(a * inv_b * A, W)) * inv_diff
    r1 = partial(xi * inv_a, Z) - A
    r2 = partial(xi * inv_b, W) - B
    return Thm1Data(a, b, A, B, xi, r1, r2)


# ---------------------------------------------------------------- web criterion


class _BetaTable:
    """Cached pieces of ``beta_ijkl`` for one frame (indices are 1-based)."""

    def __init__(self, frame: WebFrame, unit_tol: float):
        if abs(frame.d_gamma.r.constant) <= unit_tol:
            raise BlaschkeFlat("Blaschke curvature vanishes at the origin")
        self.frame = frame
        self.unit_tol = unit_tol
        self.inv_dgamma = invert(frame.d_gamma.r, unit_tol)
        self.d_omega = tuple(exterior_d(w) for w in frame.omega)
        self._u: dict[tuple[int, int], Series2] = {}
        self._coef: dict[tuple[int, int, int], Series2] = {}

    def u(self, i: int, j: int) -> Series2:
        key = (i, j)
        if key not in self._u:
            fr = self.frame
            hw = scale_form(fr.h[i - 1], fr.omega[j - 1])
            self._u[key] = ratio2(exterior_d(hw), fr.Omega, self.unit_tol)
        return self._u[key]

    def coefficient(self, i: int, j: int, k: int) -> Series2:
        """The function multiplying ``w_l`` in ``beta_ijkl``."""
        key = (i, j, k)
        if key not in self._coef:
            u = self.u(i, j)
            wk = self.frame.omega[k - 1]
            bracket = (2 * u) * self.d_omega[k - 1] + wedge(grad(u), wk)
            self._coef[key] = bracket.r * self.inv_dgamma
        return self._coef[key]

    def beta(self, i: int, j: int, k: int, l: int) -> OneForm:
        return scale_form(self.coefficient(i, j, k), self.frame.omega[l - 1])


def beta_ijkl(frame: WebFrame, i: int, j: int, k: int, l: int,
              unit_tol: float = UNIT_TOL) -> OneForm:
    """``(1/dgamma) [2 u dw_k + du ^ w_k] w_l`` with ``u = d(h_i w_j) / Omega``."""
    return _BetaTable(frame, unit_tol).beta(i, j, k, l)


BETA_S_TERMS = {(2, 1, 2, 1): -1, (1, 2, 1, 2): -1, (2, 2, 1, 1): 1, (1, 1, 2, 2): 1}
BETA_A_TERMS = {
    (1, 1, 2, 1): 2,
    (1, 2, 1, 1): -2,
    (2, 1, 2, 1): 1,
    (1, 2, 1, 2): -1,
    (1, 1, 2, 2): 1,
    (2, 2, 1, 1): -1,
    (2, 1, 2, 2): 2,
    (2, 2, 1, 2): -2,
}


@dataclass(frozen=True, eq=False)
class Thm2Data:
    beta: dict
    alpha: OneForm
    beta_s: OneForm
    beta_a: OneForm
    res_a: TwoForm
    res_s: TwoForm
    gamma: OneForm

    def summary(self, scale: float, tol: float = RESIDUAL_TOL) -> CriterionResult:
        pairs = (
            (exterior_d(self.beta_a).r, exterior_d(self.alpha).r),
            (exterior_d(self.beta_s).r, exterior_d(self.gamma).r),
        )
        return summarize("thm2", pairs, tol, scale)


def _combine(table: _BetaTable, terms: dict) -> OneForm:
    out = None
    for idx, c in terms.items():
        piece = c * table.beta(*idx)
        out = piece if out is None else out + piece
    return out


def thm2_evaluate(frame: WebFrame, unit_tol: float = UNIT_TOL) -> Thm2Data:
    table = _BetaTable(frame, unit_tol)
    h, omega = frame.h, frame.omega
    alpha = None
    for i, j in itertools.permutations(range(3), 2):
        term = scale_form(h[i], omega[j])
        alpha = term if alpha is None else alpha + term
    beta_s = _combine(table, BETA_S_TERMS)
    beta_a = _combine(table, BETA_A_TERMS)
    betas = {idx: table.beta(*idx) for idx in {**BETA_S_TERMS, **BETA_A_TERMS}}
    return Thm2Data(
        beta=betas,
        alpha=alpha,
        beta_s=beta_s,
        beta_a=beta_a,
        res_a=exterior_d(beta_a - alpha),
        res_s=exterior_d(beta_s - frame.gamma),
        gamma=frame.gamma,
    )


# ---------------------------------------------------------------- frame equations


@dataclass(frozen=True, eq=False)
class PresymData:
    Xi: Series2
    sides1: tuple[TwoForm, TwoForm]  # d(Xi w2), d(2 h1 w2 + h2 w1)
    sides2: tuple[TwoForm, TwoForm]  # -d(Xi w1), d(h1 w2 + 2 h2 w1)

    @property
    def e1(self) -> TwoForm:
        return self.sides1[0] - self.sides1[1]

    @property
    def e2(self) -> TwoForm:
        return self.sides2[0] - self.sides2[1]

    def summary(self, scale: float, tol: float = RESIDUAL_TOL) -> CriterionResult:
        pairs = [(l.r, r.r) for l, r in (self.sides1, self.sides2)]
        return summarize("web_presym", pairs, tol, scale)


def presym_evaluate(frame: WebFrame, unit_tol: float = UNIT_TOL) -> PresymData:
    table = _BetaTable(frame, unit_tol)
    h, (w1, w2, _) = frame.h, frame.omega
    # u = d(h1 w2 + 2 h2 w1)/Omega pairs with w2, v = d(2 h1 w2 + h2 w1)/Omega with w1
    Xi = (table.coefficient(1, 2, 2) + 2 * table.coefficient(2, 1, 2)
          + 2 * table.coefficient(1, 2, 1) + table.coefficient(2, 1, 1))
    sides1 = (exterior_d(scale_form(Xi, w2)),
              exterior_d(scale_form(2 * h[0], w2) + scale_form(h[1], w1)))
    sides2 = (-exterior_d(scale_form(Xi, w1)),
              exterior_d(scale_form(h[0], w2) + scale_form(2 * h[1], w1)))
    return PresymData(Xi, sides1, sides2)


# ---------------------------------------------------------------- proof identities


@dataclass(frozen=True)
class CrossCheckReport:
    entries: dict  # name -> (max_abs_residual, valid_order)
    scale: float

    def worst(self) -> float:
        return max(m for m, _ in self.entries.values())

    def passed(self, tol: float = 1e-8) -> bool:
        return self.worst() <= tol * self.scale

    def failures(self, tol: float = 1e-8) -> list[str]:
        return [k for k, (m, _) in self.entries.items() if m > tol * self.scale]


def proof_crosschecks(frame: WebFrame, adapted: AdaptedWebData,
                      unit_tol: float = UNIT_TOL) -> CrossCheckReport:
    """Evaluate the identities relating the coordinate and web pictures in a
    frame with ``w1 = f dz`` and ``w2 = g dw``."""
    f, g, F, G = adapted.f, adapted.g, adapted.F, adapted.G
    fg = f * g
    inv_fg = invert(fg, unit_tol)
    eta = frame.eta()
    t1 = thm1_evaluate(eta.c1, eta.c2, unit_tol)
    pre = presym_evaluate(frame, unit_tol)
    checks = {
        "a=-f^2g": eta.c1 + f * f * g,
        "b=-fg^2": eta.c2 + f * g * g,
        "eta_pure_terms": eta.c0 + eta.c3,
        "Omega=fg": frame.Omega.r - fg,
        "h1=-f_w/(fg)": frame.h[0] + partial(f, W) * inv_fg,
        "h2=g_z/(fg)": frame.h[1] - partial(g, Z) * inv_fg,
        "h3=(f_w-g_z)/(fg)": frame.h[2] - (partial(f, W) - partial(g, Z)) * inv_fg,
        "gamma_dz=g_z/g": frame.gamma.p - partial(g, Z) * invert(g, unit_tol),
        "gamma_dw=f_w/f": frame.gamma.q - partial(f, W) * invert(f, unit_tol),
        "dgamma=F-G": frame.d_gamma.r - (F - G),
        "A=2F+G": t1.A - (2 * F + G),
        "B=F+2G": t1.B - (F + 2 * G),
        "A-B=F-G": (t1.A - t1.B) - (F - G),
        "xi=f^2g^2Xi": t1.xi - fg * fg * pre.Xi,
        "presym1=-r1": pre.e1.r + t1.r1,
        "presym2=-r2": pre.e2.r + t1.r2,
    }
    entries = {k: (max_abs_coeff(s, s.valid_order), s.valid_order) for k, s in checks.items()}
    return CrossCheckReport(entries, scale_of(f, g))


# ---------------------------------------------------------------- oracle


@dataclass(frozen=True, eq=False)
class OracleResult:
    closed: bool
    obstruction_order: int | None
    Z: Series2 | None = None
    W: Series2 | None = None
    H: Series2 | None = None
    c: Series2 | None = None
    d: Series2 | None = None
    max_abs_residual: float = 0.0
    valid_order: int = 0

    @property
    def status(self) -> str:
        return "ClosedDecompositionFound" if self.closed else "Obstructed"

    def summary(self) -> CriterionResult:
        return CriterionResult(
            name="oracle",
            applicable=True,
            max_abs_residual=self.max_abs_residual,
            first_nonzero_degree=self.obstruction_order,
            valid_order=self.valid_order,
            vanishes=self.closed,
        )


def _oracle_system(a: Series2, b: Series2, m: int):
    """Rows: monomials of degree <= m; columns: c_0..c_m then d_0..d_m."""
    rows = [(i, d - i) for d in range(m + 1) for i in range(d + 1)]
    mat = np.zeros((len(rows), 2 * (m + 1)), dtype=complex)
    for r, (i, j) in enumerate(rows):
        for k in range(j + 1):
            mat[r, k] = a[i, j - k]
        for k in range(i + 1):
            mat[r, m + 1 + k] = -b[i - k, j]
    return rows, mat


def _lstsq(mat: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sol = np.linalg.lstsq(mat, rhs, rcond=None)[0]
    return sol, mat @ sol - rhs


def oracle_decompose(a: Series2, b: Series2, tol: float = RESIDUAL_TOL,
                     unit_tol: float = UNIT_TOL) -> OracleResult:
    """Search for closed factors ``Z(z) dz``, ``W(w) dw``, ``dH`` with
    ``a = Z W H_z`` and ``b = Z W H_w``.

    A solution exists exactly when ``a_w - b_z = a c(w) - b d(z)`` for some
    univariate ``c`` and ``d``; that linear system is solved degree by degree
    and the first inconsistent degree is reported as the obstruction.
    """
    invert(a, unit_tol)
    invert(b, unit_tol)
    n = min(a.max_order, b.max_order)
    a, b = a.truncate(n), b.truncate(n)
    lhs = partial(a, W) - partial(b, Z)
    m = lhs.valid_order
    scale = scale_of(a, b)
    # per-degree threshold, relative to the size of a_w - b_z in that degree
    ref = np.maximum(scale, degree_norms(lhs, m))
    worst = 0.0
    sol = None
    for top in range(m + 1):
        rows, mat = _oracle_system(a, b, top)
        rhs = np.array([lhs[i, j] for i, j in rows])
        sol, res = _lstsq(mat, rhs)
        err = np.abs(res)
        worst = max(worst, float(err.max()))
        degs = np.array([i + j for i, j in rows])
        # the fit spreads an inconsistency over all rows, so report ``top``
        if (err > tol * ref[degs]).any():
            return OracleResult(False, top, max_abs_residual=worst, valid_order=m)
    c = Series2.from_dict({(0, k): sol[k] for k in range(m + 1)}, n, m)
    d = Series2.from_dict({(k, 0): sol[m + 1 + k] for k in range(m + 1)}, n, m)
    Zs = exp_series(antiderivative(d, Z))
    Ws = exp_series(antiderivative(c, W))
    inv_zw = invert(Zs * Ws, unit_tol)
    P = a * inv_zw
    Q = b * inv_zw
    Pw, Qz = partial(P, W), partial(Q, Z)
    compat = summarize("compat", [(Pw, Qz)], tol, scale)
    worst = max(worst, compat.max_abs_residual)
    if not compat.vanishes:
        return OracleResult(False, compat.first_nonzero_degree, max_abs_residual=worst,
                            valid_order=compat.valid_order)
    Hz = antiderivative(P, Z)
    rest = Q - partial(Hz, W)
    rest_w = Series2.from_dict({(0, j): rest[0, j] for j in range(n + 1)}, n, rest.valid_order)
    H = Hz + antiderivative(rest_w, W)
    return OracleResult(True, None, Zs, Ws, H, c, d, worst, m)


# ---------------------------------------------------------------- verdict


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: str
    checked_order: int
    criteria: tuple[CriterionResult, ...]
    preconditions: dict
    agreement: bool
    details: dict = field(default_factory=dict, repr=False)

    def criterion(self, name: str) -> CriterionResult:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)


# criteria that certify both directions; the rest are necessary conditions only
DECISIVE = ("thm1", "oracle")


def is_closed(eta: Sym3Diff, order: int | None = None, tol: float = RESIDUAL_TOL,
              unit_tol: float = UNIT_TOL) -> Verdict:
    """Decide closedness of ``eta`` at the origin to the given truncation order."""
    if order is not None:
        eta = eta.truncate(order)
    if not is_nondegenerate(eta, unit_tol):
        raise Degenerate("discriminant vanishes at the origin")
    eta_scale = scale_of(*eta.coeffs)
    frame = build_frame(eta, unit_tol)
    dgamma0 = frame.d_gamma.r.constant
    blaschke_unit = abs(dgamma0) > unit_tol * eta_scale
    details: dict = {"frame": frame}
    results = []

    if blaschke_unit:
        t2 = thm2_evaluate(frame, unit_tol)
        details["thm2"] = t2
        results.append(t2.summary(eta_scale, tol))
    else:
        results.append(CriterionResult("thm2", False, note="Blaschke curvature vanishes at the origin"))

    chart = adapt_coordinates(eta, frame, tol, unit_tol)
    details["chart"] = chart
    if blaschke_unit:
        # A - B differs from d gamma by a unit, so flatness is decided once above
        t1 = thm1_evaluate(chart.a, chart.b, unit_tol)
        details["thm1"] = t1
        results.append(t1.summary(tol))
    else:
        results.append(CriterionResult("thm1", False, note="A - B vanishes at the origin"))

    try:
        oracle = oracle_decompose(chart.a, chart.b, tol, unit_tol)
    except NotAUnit as exc:
        results.append(CriterionResult("oracle", False, note=str(exc)))
    else:
        details["oracle"] = oracle
        results.append(oracle.summary())

    applicable = [r for r in results if r.applicable]
    decisive = [r for r in applicable if r.name in DECISIVE]
    votes = {r.vanishes for r in decisive}
    if len(votes) > 1:
        raise InternalInconsistency(
            "criteria disagree: "
            + ", ".join(f"{r.name}={'closed' if r.vanishes else 'not closed'}" for r in decisive)
        )
    if not decisive:
        kind = INDETERMINATE
    else:
        kind = CLOSED if votes.pop() else NOT_CLOSED
    necessary_failed = [r.name for r in applicable if r.name not in DECISIVE and not r.vanishes]
    if kind == CLOSED and necessary_failed:
        raise InternalInconsistency(
            f"closed decomposition found but {', '.join(necessary_failed)} residual is nonzero"
        )
    agreement = len({r.vanishes for r in applicable}) <= 1
    checked = min((r.valid_order for r in applicable), default=0)
    return Verdict(
        kind=kind,
        checked_order=checked,
        criteria=tuple(sorted(results, key=lambda r: r.name)),
        preconditions={"discriminant_unit": True, "blaschke_unit": blaschke_unit},
        agreement=agreement,
        details=details,
    )
