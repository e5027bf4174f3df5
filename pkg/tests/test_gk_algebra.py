from fractions import Fraction as Fr
from itertools import product

import pytest
from hypothesis import given, strategies as st

from weilinterp import exact
from weilinterp.gk_algebra import (
    GkModule, KWeight, PrincipalSeries, casimir_eigenvalue, complement_is_finite,
    complementary_module, ext1_dim, ext1_weight_criterion, is_irreducible,
    ladder_case_from_ranks, principal_series_structure, ps_ladder_matrices,
)

L, H = GkModule.lowest, GkModule.highest


def test_kweight_equality_cross_multiplies():
    assert KWeight(1, 2) == KWeight(2, 4)
    assert KWeight(1, 2) != KWeight(1, 3)
    w = KWeight(1, 2) + 2
    assert w == Fr(5, 2) and w.cover_degree == 2
    assert (KWeight(1, 2) - 2).cover_degree == 2
    with pytest.raises(ValueError):
        KWeight(1, 0)


def test_casimir_examples():
    assert casimir_eigenvalue(L("1/2")) == Fr(-3, 8)
    assert casimir_eigenvalue(H("-3/2")) == Fr(-3, 8)
    assert casimir_eigenvalue(H(0)) == 0
    assert casimir_eigenvalue(GkModule.finite(3)) == 4
    assert casimir_eigenvalue(GkModule.doubly_infinite(0, Fr(-1, 2))) == Fr(-1, 2)


def test_complement_examples():
    assert complementary_module(L("1/2")) == H("-3/2")
    assert complementary_module(L("3/2")) == H("-1/2")
    d = GkModule.doubly_infinite(0, Fr(-1, 2))
    assert complementary_module(d) == d
    with pytest.raises(ValueError):
        complementary_module(GkModule.finite(2))


def test_complement_discrete_series_is_finite():
    # radial d = 4, 6: lowest weight d/2 has a finite-dimensional complement
    assert complementary_module(L(2)) == GkModule.finite(1)
    assert complementary_module(L(3)) == GkModule.finite(2)
    assert complementary_module(H(-3)) == GkModule.finite(2)
    assert complement_is_finite(L(2))
    assert not complement_is_finite(L(1))
    assert not complement_is_finite(L("5/2"))


def test_ext1_examples():
    assert ext1_dim(L("1/2"), H("-3/2")) == 1
    assert ext1_dim(L("1/2"), L("1/2")) == 0
    for d in (4, 6, 8):
        w = L(d // 2)
        match = d // 2 - 1
        for k in range(1, 7):
            assert ext1_dim(w, GkModule.finite(k)) == int(k == match)
    with pytest.raises(ValueError):
        ext1_dim(GkModule.finite(2), L("1/2"))
    with pytest.raises(ValueError):
        ext1_dim(L(0), L("1/2"))


def test_irreducibility_rules():
    assert not is_irreducible(L(0))
    assert not is_irreducible(H(1))
    assert is_irreducible(L(1))
    # lambda = 0 with integral coset has a lowest weight vector
    assert not is_irreducible(GkModule.doubly_infinite(0, 0))
    assert is_irreducible(GkModule.doubly_infinite(Fr(1, 2), 0))
    assert is_irreducible(GkModule.doubly_infinite(0, Fr(1, 3)))


weights = st.fractions(min_value=-6, max_value=6, max_denominator=4)


def _infinite_irreducibles(z):
    out = []
    for m in (L(z), H(z)):
        if is_irreducible(m):
            out.append(m)
    return out


@given(weights)
def test_complement_preserves_casimir(z):
    for w in _infinite_irreducibles(z):
        assert casimir_eigenvalue(complementary_module(w)) == casimir_eigenvalue(w)


@given(weights)
def test_complement_is_involution(z):
    for w in _infinite_irreducibles(z):
        c = complementary_module(w)
        if c.is_infinite:
            assert complementary_module(c) == w


def _candidates():
    zs = [Fr(n, 4) for n in range(-20, 21)]
    out = [GkModule.finite(k) for k in range(1, 6)]
    for z in zs:
        out += _infinite_irreducibles(z)
    return out


def test_ext1_matches_weight_criterion():
    cands = _candidates()
    for w, v in product(cands, cands):
        if not w.is_infinite:
            continue
        assert ext1_dim(w, v) == ext1_weight_criterion(w, v), (w, v)


def test_ps_examples():
    rep = principal_series_structure(PrincipalSeries.of(0, 0))
    assert rep.case_tag == "A" and len(rep.factors) == 1

    rep = principal_series_structure(PrincipalSeries.of("1/2", "-1/2"))
    assert rep.case_tag == "B"
    assert rep.factors[0] == (L("1/2"), "sub")
    assert rep.factors[1] == (H("-3/2"), "quotient")
    assert PrincipalSeries.of("1/2", "-1/2").m_coeff(Fr(1, 2)) == 0

    rep = principal_series_structure(PrincipalSeries.of(0, 1))
    assert rep.case_tag == "C"
    assert set(rep.modules("sub")) == {L(2), H(-2)}
    assert rep.modules("quotient") == [GkModule.finite(1)]


def test_ps_case_c_negative_xi_has_finite_sub():
    rep = principal_series_structure(PrincipalSeries.of(1, -2))
    assert rep.modules("sub") == [GkModule.finite(2)]
    assert set(rep.modules("quotient")) == {L(3), H(-3)}


def test_ps_degenerate_xi_zero_is_flagged():
    rep = principal_series_structure(PrincipalSeries.of(1, 0))
    assert rep.case_tag == "C" and rep.degenerate
    assert all(m.kind != "finite" for m in rep.modules())


def test_ps_case_b_quotient_is_complement():
    for z0, xi in [("1/2", "-1/2"), ("1/2", "3/2"), ("1/3", "-2/3"), ("1/4", "-11/4"), ("3/2", "1/2")]:
        rep = principal_series_structure(PrincipalSeries.of(z0, xi))
        assert rep.case_tag == "B"
        (sub, _), (quo, _) = rep.factors
        assert quo == complementary_module(sub)
        assert casimir_eigenvalue(sub) == PrincipalSeries.of(z0, xi).casimir


def test_ladder_window_edges():
    ps = PrincipalSeries.of("1/2", "-1/2")
    P, M, K = ps_ladder_matrices(ps, "1/2", 1)
    assert P == [[0]] and M == [[0]] and K == [[Fr(1, 2)]]
    P, M, K = ps_ladder_matrices(ps, "-3/2", 4)
    # m e_{1/2} = 0: column of weight 1/2 (index 1) has no lowering entry
    assert M[0][1] == 0
    with pytest.raises(ValueError):
        ps_ladder_matrices(ps, 0, 3)


@given(st.fractions(min_value=-3, max_value=3, max_denominator=3),
       st.fractions(min_value=-4, max_value=4, max_denominator=6))
def test_ladder_identities_on_interior(z0, xi):
    ps = PrincipalSeries.of(z0, xi)
    n = 7
    P, M, K = ps_ladder_matrices(ps, z0 - 6, n)
    PM, MP = exact.matmul(P, M), exact.matmul(M, P)
    KP, PK = exact.matmul(K, P), exact.matmul(P, K)
    KM, MK = exact.matmul(K, M), exact.matmul(M, K)
    for i in range(1, n - 1):
        assert PM[i][i] - MP[i][i] == K[i][i]
        cas = K[i][i] ** 2 / 2 + K[i][i] + 2 * MP[i][i]
        assert cas == ps.casimir
        cas2 = K[i][i] ** 2 / 2 - K[i][i] + 2 * PM[i][i]
        assert cas2 == ps.casimir
    for i in range(n):
        for j in range(n):
            assert KP[i][j] - PK[i][j] == 2 * P[i][j]
            assert KM[i][j] - MK[i][j] == -2 * M[i][j]


def test_classification_agrees_with_ladder_ranks():
    zeta0s = [0, 1, Fr(1, 2), Fr(3, 2), Fr(1, 3)]
    xis = [0, 1, 2, -1, -2, Fr(1, 2), Fr(-1, 2), Fr(3, 2), Fr(1, 3), Fr(-2, 3)]
    seen = set()
    for z0, xi in product(zeta0s, xis):
        ps = PrincipalSeries.of(z0, xi)
        rep = principal_series_structure(ps)
        tag, p_kills, m_kills = ladder_case_from_ranks(ps)
        assert rep.case_tag == tag, (z0, xi)
        seen.add(tag)
        if tag == "B":
            sub = rep.modules("sub")[0]
            if m_kills:
                assert sub == L(m_kills[0])
            else:
                assert sub == H(p_kills[0])
    assert seen == {"A", "B", "C"}
