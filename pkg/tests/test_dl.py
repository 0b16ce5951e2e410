from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stratalab import dl
from stratalab.dl import StratumLabel
from stratalab.fq import FqSubspace, field, iter_subspaces, projective_points

X = 3  # residue index of the generator x of F_9 = F_3[x]/(x^2 + 1)
MINUS_X = 6


def test_std_gram_is_signed_antidiagonal():
    F = field(3, 2)
    assert dl.std_gram(F) == ((0, 0, 0, 1), (0, 0, 1, 0), (0, 2, 0, 0), (2, 0, 0, 0))


def test_frobenius_subspace_examples():
    U = FqSubspace.span(3, 2, [[1, X, 0, 0]])
    assert dl.frobenius_subspace(U, 3) == FqSubspace.span(3, 2, [[1, MINUS_X, 0, 0]])
    assert dl.frobenius_subspace(U, 3) != U
    R = FqSubspace.span(3, 2, [[1, 2, 0, 1], [0, 0, 1, 1]])
    assert dl.frobenius_subspace(R, 3) == R


vec9 = st.lists(st.integers(0, 8), min_size=4, max_size=4)


@given(st.lists(vec9, min_size=1, max_size=3))
def test_frobenius_commutes_with_perp(rows):
    U = FqSubspace.span(3, 2, rows)
    assert dl.frobenius_subspace(dl.perp(U), 3) == dl.perp(dl.frobenius_subspace(U, 3))
    assert dl.perp(dl.perp(U)) == U
    assert dl.perp(U).dim == 4 - U.dim


def test_perp_examples():
    zero = FqSubspace.zero(3, 2, 4)
    assert dl.perp(zero) == FqSubspace.whole(3, 2, 4)
    for U in iter_subspaces(3, 1, 4, 1):
        assert U <= dl.perp(U)
    e = [[int(i == j) for j in range(4)] for i in range(4)]
    assert dl.perp(FqSubspace.span(3, 2, [e[0], e[1]])) == FqSubspace.span(3, 2, [e[0], e[1]])
    assert dl.perp(FqSubspace.span(3, 2, [e[0], e[3]])) == FqSubspace.span(3, 2, [e[1], e[2]])


def test_rational_members_are_xp1():
    for U in iter_subspaces(3, 1, 4, 3):
        assert dl.classify_point_minus(U) == StratumLabel.XP1


def test_level_two_members_are_xbw1_unless_rational():
    for U in iter_subspaces(3, 2, 4, 3):
        lab = dl.classify_point_minus(U)
        assert lab != StratumLabel.XBw2
        if lab != StratumLabel.NotInY:
            assert (lab == StratumLabel.XP1) == U.is_rational()


def test_plus_and_minus_routes_agree_on_all_f9_lines():
    lines = list(iter_subspaces(3, 2, 4, 1))
    assert len(lines) == 820
    for U in lines:
        assert dl.classify_point_plus(U) == dl.classify_point_minus(dl.perp(U))


def test_xbw2_witness_over_f81():
    F = field(3, 4)
    x = (1, 3, 9, 63)
    assert dl.pairing_with_frobenius(x, F, 1) == 0
    assert dl.pairing_with_frobenius(x, F, 2) != 0
    assert dl.classify_point_plus(FqSubspace.span(3, 4, [x])) == StratumLabel.XBw2


def test_surface_examples():
    F3 = field(3, 1)
    for x in projective_points(F3, 4):
        assert dl.surface_member(tuple(int(a) for a in x), F3)
    F9 = field(3, 2)
    first_non_member = next(
        tuple(int(a) for a in x) for x in projective_points(F9, 4) if not dl.surface_member(tuple(int(a) for a in x), F9)
    )
    assert first_non_member == (0, 1, 3, 0)
    for x in projective_points(F9, 4):
        x = tuple(int(a) for a in x)
        assert dl.surface_member(x, F9) == (dl.pairing_with_frobenius(x, F9, 1) == 0)
    with pytest.raises(ValueError):
        dl.surface_member((0, 0, 0, 0), F9)


def _counts_by_subspace_route(p, d):
    out = {lab: 0 for lab in dl.LABEL_ORDER}
    for U in iter_subspaces(p, d, 4, 3):
        out[dl.classify_point_minus(U)] += 1
    return out


@pytest.mark.parametrize("p,d", [(3, 1), (3, 2), (5, 1)])
def test_vectorized_counts_match_subspace_route(p, d):
    assert dl.count_strata(p, d) == _counts_by_subspace_route(p, d)


def test_frozen_strata_counts():
    S = StratumLabel
    assert dl.count_strata(3, 1) == {S.XP1: 40, S.XBw1: 0, S.XBw2: 0, S.NotInY: 0}
    assert dl.count_strata(3, 2) == {S.XP1: 40, S.XBw1: 240, S.XBw2: 0, S.NotInY: 540}
    assert dl.count_strata(5, 1) == {S.XP1: 156, S.XBw1: 0, S.XBw2: 0, S.NotInY: 0}
    assert dl.count_strata(5, 2) == {S.XP1: 156, S.XBw1: 3120, S.XBw2: 0, S.NotInY: 13000}


def test_level_four_counts_and_surface_cross_check():
    S = StratumLabel
    F = field(3, 4)
    counts = dl.count_strata(3, 4)
    assert counts == {S.XP1: 40, S.XBw1: 3120, S.XBw2: 5184, S.NotInY: 529740}
    members = sum(v for k, v in counts.items() if k != S.NotInY)
    assert int(dl.surface_points(F).sum()) == members


@pytest.mark.parametrize("p", [3, 5])
def test_components_of_the_curve_stratum(p):
    comps = dl.components_w1(p)
    assert len(comps) == (p + 1) * (p**2 + 1)
    keys = set()
    for T, lines in comps:
        assert T.dim == 2 and T.is_rational() and dl.perp(T) == T
        assert len(lines) == p + 1
        assert all(L <= T and L.is_rational() for L in lines)
        keys.add(T.key())
    assert len(keys) == len(comps)


def test_components_by_brute_force():
    # independent count: rational planes that are totally isotropic
    F = field(3, 1)
    g = dl.std_gram(F)
    iso = [T for T in iter_subspaces(3, 1, 4, 2) if all(F.form(g, u, v) == 0 for u in T.basis for v in T.basis)]
    assert {T.key() for T in iso} == {T.key() for T, _ in dl.components_w1(3)}
