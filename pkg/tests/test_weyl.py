from __future__ import annotations

import time

import pytest

from stratalab import weyl
from stratalab.weyl import IDENTITY

S0, S1, S2 = weyl.simple_reflections()
RHO = weyl.rho_element()
ALCOVE6 = ((0, 0), (3, 0), (3, 3))  # vertices of types 0, 1, 2, times 6


def power(x, n):
    y = IDENTITY
    for _ in range(n):
        y = y * x
    return y


def test_generators_are_involutions_and_satisfy_braids():
    for s in (S0, S1, S2):
        assert s * s == IDENTITY
    assert power(S0 * S1, 4) == power(S1 * S2, 4) == power(S0 * S2, 2) == IDENTITY
    assert power(S0 * S1, 2) != IDENTITY and power(S1 * S2, 2) != IDENTITY


def test_reflections_fix_opposite_faces():
    for i, s in enumerate((S0, S1, S2)):
        face = [v for j, v in enumerate(ALCOVE6) if j != i]
        for v in face:
            assert s.act6(v) == v
        assert s.act6(ALCOVE6[i]) != ALCOVE6[i]


def test_rho():
    assert sorted(RHO.act6(v) for v in ALCOVE6) == sorted(ALCOVE6)
    assert RHO.act6(ALCOVE6[0]) == ALCOVE6[2] and RHO.act6(ALCOVE6[1]) == ALCOVE6[1]
    assert RHO * RHO == IDENTITY
    assert [weyl.conjugate_by_rho(s) for s in (S0, S1, S2)] == [S2, S1, S0]


def test_lengths_and_words():
    assert weyl.length(IDENTITY) == weyl.length(RHO) == 0
    assert [weyl.length(s) for s in (S0, S1, S2)] == [1, 1, 1]
    t = weyl.translation(1, 1)
    assert weyl.length(t) == 3
    assert weyl.reduced_word(IDENTITY) == ((), 0)
    assert weyl.reduced_word(RHO) == ((), 1)
    word, eps = weyl.reduced_word(t)
    assert (word, eps) == ((0, 1, 0), 1)
    assert weyl.word_element(word, eps) == t


def test_length_matches_word_length_on_ball():
    for w in weyl.ball(4):
        word, eps = weyl.reduced_word(w)
        assert len(word) == weyl.length(w)
        assert weyl.word_element(word, eps) == w


def test_bruhat_order_properties():
    elems = [w for w in weyl.ball(4)]
    for u in elems:
        if u.omega == 0:
            assert weyl.bruhat_leq(IDENTITY, u)
    for u in elems:
        for w in elems:
            le = weyl.bruhat_leq(u, w)
            assert le == weyl.bruhat_leq_subwords(u, w)
            if le:
                assert weyl.length(u) <= weyl.length(w)
                if weyl.bruhat_leq(w, u):
                    assert u == w


def test_admissible_set():
    adm = weyl.adm_set()
    assert adm == weyl.adm_set_bruteforce()
    assert len(adm) == 13
    trans = weyl.mu_translations()
    assert len(trans) == 4
    assert all(t in adm and weyl.length(t) == 3 for t in trans)
    assert min(adm, key=weyl.length) == RHO
    maximal = [w for w in adm if not any(w != v and weyl.bruhat_leq(w, v) for v in adm)]
    assert sorted(maximal) == sorted(trans)
    adm_set = set(adm)
    for w in adm:
        for u in weyl.ball(3):
            if weyl.bruhat_leq(u, w):
                assert u in adm_set


def test_coset_minimal_predicate():
    K = (0, 2)
    pred = weyl.min_coset_reps(K)
    assert pred(IDENTITY)
    assert pred(S1 * RHO)
    for k in [(), (0,), (1,), (2,), (0, 2), (0, 1)]:
        assert weyl.min_coset_reps(k)(IDENTITY)
    for w in weyl.ball(4):
        assert pred(w) == weyl.is_coset_minimal_bruteforce(w, K)


def test_eo_set():
    eo = weyl.eo_set((0, 2))
    names = [weyl.name(w) for w in eo]
    assert names == ["rho", "s1·rho", "s1s0·rho", "s1s2·rho", "s1s0s2·rho"]
    adm = set(weyl.adm_set())
    pred = weyl.min_coset_reps((0, 2))
    assert all(w in adm and pred(w) for w in eo)
    # the only length-3 element has full support and is not sigma-Coxeter for either action
    long = [w for w in eo if weyl.length(w) > 2]
    assert [weyl.support(w) for w in long] == [frozenset({0, 1, 2})]
    for case in ("quaternionic", "paramodular"):
        assert not weyl.is_sigma_coxeter(long[0], weyl.DynkinAction.for_case(case))


def test_dynkin_actions_and_supports():
    quat, para = weyl.DynkinAction.quaternionic(), weyl.DynkinAction.paramodular()
    assert quat.composite() == (0, 1, 2)
    assert para.composite() == (2, 1, 0)
    for act in (quat, para):
        assert weyl.sigma_support(S1 * RHO, act) == frozenset({1})
        assert weyl.sigma_support(RHO, act) == frozenset()
    assert weyl.is_sigma_coxeter(S1 * S2 * RHO, quat)
    assert weyl.is_sigma_coxeter(S1 * RHO, para)
    full = S1 * S0 * S2 * RHO
    assert weyl.support(full) == frozenset({0, 1, 2})
    assert not weyl.is_sigma_coxeter(full, quat) and not weyl.is_sigma_coxeter(full, para)


def test_j_sets():
    quat, para = weyl.DynkinAction.quaternionic(), weyl.DynkinAction.paramodular()
    jq = weyl.j_set((0, 2), quat)
    jp = weyl.j_set((0, 2), para)
    assert sorted(map(sorted, jq)) == [[0], [0, 2], [1], [2]]
    assert sorted(map(sorted, jp)) == [[0, 2], [1]]
    assert frozenset({0, 1}) not in jq and frozenset({0, 1}) not in jp


def test_golden_tables():
    start = time.perf_counter()
    quat = [r.serialize() for r in weyl.eo_table("quaternionic")]
    para = [r.serialize() for r in weyl.eo_table("paramodular")]
    assert time.perf_counter() - start < 1.0
    assert quat == [
        [[1], "rho", [0, 2], []],
        [[0, 2], "s1·rho", [1], [1]],
        [[0], "s1s2·rho", [1, 2], [1, 2]],
        [[2], "s1s0·rho", [0, 1], [0, 1]],
    ]
    assert para == [
        [[1], "rho", [0, 2], []],
        [[0, 2], "s1·rho", [1], [1]],
    ]
    assert quat == weyl.GOLDEN_TABLES["quaternionic"] and para == weyl.GOLDEN_TABLES["paramodular"]


def test_table_lengths_match_dl_dimensions():
    # lengths 0, 1, 2, 2 match point, curve, surface, surface
    lengths = [weyl.length(w) for w in (RHO, S1 * RHO, S1 * S2 * RHO, S1 * S0 * RHO)]
    assert lengths == [0, 1, 2, 2]


def test_unknown_case_rejected():
    with pytest.raises(ValueError):
        weyl.DynkinAction.for_case("siegel")
