import itertools

import numpy as np
import pytest
import sympy as sp

import symdiff3.criteria as criteria
from symdiff3.criteria import (
    CLOSED,
    NOT_CLOSED,
    beta_ijkl,
    is_closed,
    oracle_decompose,
    presym_evaluate,
    proof_crosschecks,
    summarize,
    thm1_evaluate,
    thm2_evaluate,
)
from symdiff3.errors import BlaschkeFlat, Degenerate, InternalInconsistency
from symdiff3.exterior import OneForm, Sym3Diff, exterior_d
from symdiff3.fixtures import (
    blaschke_gap,
    eta_of,
    fixture_c,
    fixture_c_potential,
    fixture_k,
    fixture_w,
    gen_closed,
    gen_perturbed,
)
from symdiff3.series import W, Z, Series2, max_abs_coeff, partial
from symdiff3.web import adapted_data, adapted_frame, frame_from_fg

import symbolic
from symbolic import taylor

N = 12


def norm(s: Series2, up_to=None) -> float:
    return max_abs_coeff(s, s.valid_order if up_to is None else up_to)


def zw():
    return Series2.var(Z, N), Series2.var(W, N)


# ---------------------------------------------------------------- coordinate PDE


def test_fixture_c_xi_and_residuals():
    t = thm1_evaluate(*fixture_c())
    z, w = zw()
    assert norm(t.xi - (z - w)) <= 1e-12
    assert norm(t.r1) <= 1e-12 and norm(t.r2) <= 1e-12
    assert t.r1.valid_order == N - 4


def test_fixture_w_against_sympy():
    sz, sw = symbolic.z, symbolic.w
    a_s, b_s = -(1 + sz * sw) ** 2, -(1 + sz * sw)
    A_s = sp.diff(sp.log(a_s), sz, sw)
    B_s = sp.diff(sp.log(b_s), sz, sw)
    xi_s = sp.simplify((a_s * sp.diff(b_s / a_s * B_s, sz) - b_s * sp.diff(a_s / b_s * A_s, sw)) / (A_s - B_s))
    # hand-checked closed forms
    assert sp.expand(xi_s - (3 * sw - 2 * sz - 2 * sz**2 * sw)) == 0
    r2_s = sp.simplify(sp.diff(xi_s / b_s, sw) - B_s)
    assert sp.simplify(r2_s + 4 / (1 + sz * sw) ** 2) == 0
    r1_s = sp.simplify(sp.diff(xi_s / a_s, sz) - A_s)

    t = thm1_evaluate(*fixture_w())
    v = t.r1.valid_order
    for mine, ref in ((t.xi, xi_s), (t.r1, r1_s), (t.r2, r2_s)):
        assert norm((mine - taylor(ref, N)).with_valid_order(v)) <= 1e-10
    assert t.r2.constant == pytest.approx(-4)


def test_blaschke_flat():
    with pytest.raises(BlaschkeFlat):
        thm1_evaluate(*fixture_k())
    a, _ = fixture_c()
    with pytest.raises(BlaschkeFlat):
        thm1_evaluate(a, a)


# ---------------------------------------------------------------- web criterion


def test_beta_against_sympy():
    z, w = zw()
    f, g = 1 + z * w, Series2.const(1, N)
    frame = frame_from_fg(f, g)
    sz, sw = symbolic.z, symbolic.w
    for idx in [(1, 2, 1, 1), (1, 1, 2, 2), (1, 2, 1, 2), (1, 1, 2, 1)]:
        ref = symbolic.beta(1 + sz * sw, sp.Integer(1), *idx)
        mine = beta_ijkl(frame, *idx)
        v = mine.valid_order
        assert norm((mine.p - taylor(sp.simplify(ref[0]), N)).with_valid_order(v)) <= 1e-10
        assert norm((mine.q - taylor(sp.simplify(ref[1]), N)).with_valid_order(v)) <= 1e-10


def test_beta_vanishes_with_h():
    z, w = zw()
    # g = 1 makes h2 = g_z / (f g) vanish
    frame = frame_from_fg(1 + z * w, Series2.const(1, N))
    assert norm(frame.h[1]) == 0
    for j, k, l in itertools.product(range(1, 4), repeat=3):
        b = beta_ijkl(frame, 2, j, k, l)
        assert norm(b.p) == 0 and norm(b.q) == 0


def test_beta_permutation_law():
    z, w = zw()
    frame = frame_from_fg(1 + z * w + 0.3 * z * z, 1 - 0.5 * w + 0.2 * z * w)
    swapped = frame.permuted((1, 0, 2))
    sigma = {1: 2, 2: 1, 3: 3}
    for idx in itertools.product(range(1, 4), repeat=4):
        mine = beta_ijkl(swapped, *idx)
        ref = beta_ijkl(frame, *(sigma[i] for i in idx))
        assert norm(mine.p - ref.p) <= 1e-9 and norm(mine.q - ref.q) <= 1e-9


def test_thm2_blaschke_flat():
    n = N
    frame = frame_from_fg(Series2.const(1, n), Series2.const(1, n))
    with pytest.raises(BlaschkeFlat):
        thm2_evaluate(frame)


def test_thm2_closed_fixture():
    t = thm2_evaluate(adapted_frame(eta_of(fixture_c())))
    assert norm(t.res_a.r) <= 1e-9 and norm(t.res_s.r) <= 1e-9


# ---------------------------------------------------------------- proof identities


@pytest.mark.parametrize("fixture", [fixture_c, fixture_w])
def test_crosschecks_on_fixtures(fixture):
    frame = adapted_frame(eta_of(fixture()))
    rep = proof_crosschecks(frame, adapted_data(frame))
    assert rep.passed(1e-9), rep.failures(1e-9)


def test_fixture_w_adapted_quantities():
    frame = adapted_frame(eta_of(fixture_w()))
    data = adapted_data(frame)
    t = thm1_evaluate(*fixture_w())
    z, w = zw()
    F_ref = taylor(1 / (1 + symbolic.z * symbolic.w) ** 2, N)
    assert norm((data.F - F_ref).with_valid_order(data.F.valid_order)) <= 1e-10
    assert norm(data.G) <= 1e-12
    v = t.A.valid_order
    assert norm((t.A - 2 * F_ref).with_valid_order(v)) <= 1e-10
    assert norm((t.B - F_ref).with_valid_order(v)) <= 1e-10


def test_presym_matches_thm1_residuals():
    frame = adapted_frame(eta_of(fixture_w()))
    pre = presym_evaluate(frame)
    eta = frame.eta()
    t = thm1_evaluate(eta.c1, eta.c2)
    assert norm(pre.e1.r + t.r1) <= 1e-9
    assert norm(pre.e2.r + t.r2) <= 1e-9
    assert norm(pre.e2.r) > 1


# ---------------------------------------------------------------- oracle


def test_oracle_fixture_c():
    o = oracle_decompose(*fixture_c())
    assert o.closed and o.status == "ClosedDecompositionFound"
    assert norm(o.Z - 1) <= 1e-12 and norm(o.W - 1) <= 1e-12
    assert norm(o.H - fixture_c_potential(N).with_valid_order(o.H.valid_order)) <= 1e-12


def test_oracle_fixture_k():
    o = oracle_decompose(*fixture_k())
    z, w = zw()
    assert o.closed
    assert norm(o.H - (-z - w).with_valid_order(o.H.valid_order)) <= 1e-14
    assert norm(o.Z - 1) == 0 and norm(o.W - 1) == 0


def test_oracle_fixture_w_obstruction():
    o = oracle_decompose(*fixture_w())
    assert not o.closed and o.status == "Obstructed"
    assert o.obstruction_order == 3


@pytest.mark.parametrize("seed", range(5))
def test_oracle_reconstructs_closed(seed):
    a, b = gen_closed(seed)
    o = oracle_decompose(a, b)
    assert o.closed
    zw_ = o.Z * o.W
    v = o.H.valid_order - 1
    assert norm(zw_ * partial(o.H, Z) - a, v) <= 1e-9
    assert norm(zw_ * partial(o.H, W) - b, v) <= 1e-9
    assert o.H.constant == 0 and o.Z.constant == 1 and o.W.constant == 1
    # Z depends on z only, W on w only
    assert np.all(o.Z.coeffs[:, 1:] == 0) and np.all(o.W.coeffs[1:, :] == 0)


# ---------------------------------------------------------------- verdicts


def test_verdict_fixture_c():
    v = is_closed(eta_of(fixture_c()))
    assert v.kind == CLOSED and v.agreement
    assert all(c.applicable and c.vanishes for c in v.criteria)
    assert v.checked_order >= 6


def test_verdict_fixture_w():
    v = is_closed(eta_of(fixture_w()))
    assert v.kind == NOT_CLOSED
    assert v.criterion("oracle").first_nonzero_degree == 3
    assert v.criterion("thm1").first_nonzero_degree == 0


def test_verdict_fixture_k():
    v = is_closed(eta_of(fixture_k()))
    assert v.kind == CLOSED
    assert v.preconditions["blaschke_unit"] is False
    assert not v.criterion("thm1").applicable and not v.criterion("thm2").applicable


def test_degenerate_input():
    z, _ = zw()
    with pytest.raises(Degenerate):
        is_closed(Sym3Diff.from_ab(z, Series2.const(1, N)))


def test_nonzero_necessary_criterion_is_not_swallowed(monkeypatch):
    real = criteria.thm2_evaluate

    def broken(frame, unit_tol=criteria.UNIT_TOL):
        t = real(frame, unit_tol)
        n = frame.max_order
        # d(z dw) = dz ^ dw, so alpha no longer matches beta_a
        alpha = t.alpha + OneForm(Series2.zero(n), Series2.var(Z, n))
        return criteria.Thm2Data(t.beta, alpha, t.beta_s, t.beta_a,
                                 exterior_d(t.beta_a - alpha), t.res_s, t.gamma)

    monkeypatch.setattr(criteria, "thm2_evaluate", broken)
    with pytest.raises(InternalInconsistency):
        is_closed(eta_of(fixture_c()))


def test_decisive_disagreement_raises(monkeypatch):
    monkeypatch.setattr(
        criteria, "oracle_decompose",
        lambda a, b, tol, unit_tol: criteria.OracleResult(False, 2, valid_order=8),
    )
    with pytest.raises(InternalInconsistency):
        is_closed(eta_of(fixture_c()))


def test_summarize_is_relative_per_degree():
    n = 6
    big = Series2.from_dict({(5, 0): 1e6}, n)
    noisy = big + Series2.monomial(5, 0, n, 1e-5)
    res = summarize("x", [(noisy, big)], tol=1e-9, scale=1.0)
    assert res.vanishes and res.max_abs_residual == pytest.approx(1e-5, rel=1e-4)
    low = Series2.monomial(1, 0, n, 1e-5)
    res = summarize("x", [(big + low, big)], tol=1e-9, scale=1.0)
    assert not res.vanishes and res.first_nonzero_degree == 1


# ---------------------------------------------------------------- generators


def test_generators_contract():
    a, b = gen_closed(7)
    a2, b2 = gen_closed(7)
    assert (a.coeffs == a2.coeffs).all() and (b.coeffs == b2.coeffs).all()
    assert abs(blaschke_gap(a, b)) > 0.1
    pa, pb = gen_perturbed(7, (a, b), magnitude=0.0)
    assert (pa.coeffs == a.coeffs).all() and (pb.coeffs == b.coeffs).all()
    pa, pb = gen_perturbed(7, (a, b))
    diff = (pa - a) + (pb - b)
    terms = list(diff.terms())
    assert len(terms) == 1
    i, j, c = terms[0]
    assert i + j >= 2 and abs(abs(c) - 1) < 1e-12
