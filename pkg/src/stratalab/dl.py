"""The finite Deligne-Lusztig sets Y+ and Y- inside F_q^4 and their strata.

Y- consists of 3-dimensional U with U^perp inside U cap sigma(U) and
dim U / (U cap sigma U) <= 1; Y+ consists of lines U with U inside
U^perp cap sigma(U^perp).  The isomorphism Y+ -> Y- used throughout is
U -> U^perp.  Frobenius is x -> x^r with r a power of p (default r = p).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .fq import FqField, FqSubspace, field, iter_subspaces, projective_points


class StratumLabel(str, Enum):
    XP1 = "XP1"
    XBw1 = "XBw1"
    XBw2 = "XBw2"
    NotInY = "NotInY"


def std_gram(F: FqField, n: int = 4) -> tuple[tuple[int, ...], ...]:
    minus = F.neg_t[1]
    return tuple(
        tuple((1 if i < j else minus) if i + j == n - 1 else 0 for j in range(n)) for i in range(n)
    )


def _frob_exponent(F: FqField, r: int) -> int:
    k, x = 0, 1
    while x < r:
        x *= F.p
        k += 1
    if x != r:
        raise ValueError(f"base field size {r} is not a power of {F.p}")
    return k


def frobenius_subspace(U: FqSubspace, r: int | None = None) -> FqSubspace:
    F = U.field
    return U.frobenius(_frob_exponent(F, r or F.p))


def perp(U: FqSubspace) -> FqSubspace:
    return U.perp(std_gram(U.field, U.n))


@dataclass(frozen=True)
class MinusMembership:
    perp_in_meet: bool
    small_defect: bool

    @property
    def member(self) -> bool:
        return self.perp_in_meet and self.small_defect


def membership_minus(U: FqSubspace, r: int | None = None) -> MinusMembership:
    sU = frobenius_subspace(U, r)
    meet = U & sU
    return MinusMembership(perp(U) <= meet, U.dim - meet.dim <= 1)


def classify_point_minus(U: FqSubspace, r: int | None = None) -> StratumLabel:
    if U.dim != 3 or U.n != 4:
        raise ValueError("expected a 3-dimensional subspace of F_q^4")
    if not membership_minus(U, r).member:
        return StratumLabel.NotInY
    sU = frobenius_subspace(U, r)
    if sU == U:
        return StratumLabel.XP1
    meet = U & sU
    if frobenius_subspace(meet, r) == meet:
        return StratumLabel.XBw1
    if meet.dim != 2 or not meet <= perp(meet):
        raise AssertionError("U cap sigma(U) is not a totally isotropic plane")
    return StratumLabel.XBw2


def pairing_with_frobenius(x: Sequence[int], F: FqField, k: int = 1) -> int:
    """(x, sigma^k x) for the standard form."""
    return F.form(std_gram(F, len(x)), x, F.frob_vec(x, k))


def plus_direct_member(U: FqSubspace) -> bool:
    """U in Y+ iff (x, sigma x) = 0 for a generator x of the line."""
    if U.dim != 1:
        raise ValueError("expected a line")
    return pairing_with_frobenius(U.basis[0], U.field) == 0


def classify_point_plus(U: FqSubspace, r: int | None = None) -> StratumLabel:
    if U.dim != 1 or U.n != 4:
        raise ValueError("expected a line in F_q^4")
    return classify_point_minus(perp(U), r)


def surface_member(x: Sequence[int], F: FqField) -> bool:
    """x3^p x0 - x0^p x3 + x2^p x1 - x1^p x2 = 0."""
    if not any(x):
        raise ValueError("the zero vector is not a projective point")
    fr, mul, add, neg = F.frob_t, F.mul_t, F.add_t, F.neg_t
    x0, x1, x2, x3 = x
    val = 0
    for a, b in ((x0, x3), (x1, x2)):
        term = add[mul[fr[b]][a]][neg[mul[fr[a]][b]]]
        val = add[val][term]
    return val == 0


# --- vectorized line-based counting -----------------------------------------------


def _vec_form(F: FqField, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(x, y) for the standard gram, rowwise over arrays of shape (N, 4)."""
    mul, add, neg = F.np_mul, F.np_add, F.np_neg
    t03 = add[mul[x[:, 0], y[:, 3]], neg[mul[x[:, 3], y[:, 0]]]]
    t12 = add[mul[x[:, 1], y[:, 2]], neg[mul[x[:, 2], y[:, 1]]]]
    return add[t03, t12]


def _minor2(F: FqField, a: np.ndarray, b: np.ndarray, i: int, j: int) -> np.ndarray:
    mul, add, neg = F.np_mul, F.np_add, F.np_neg
    return add[mul[a[:, i], b[:, j]], neg[mul[a[:, j], b[:, i]]]]


def _parallel(F: FqField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ok = np.ones(len(a), dtype=bool)
    for i in range(4):
        for j in range(i + 1, 4):
            ok &= _minor2(F, a, b, i, j) == 0
    return ok


def _rank_below_three(F: FqField, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    mul, add = F.np_mul, F.np_add
    ok = np.ones(len(a), dtype=bool)
    for cols in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        i, j, k = cols
        det = add[
            add[mul[a[:, i], _minor2(F, b, c, j, k)], F.np_neg[mul[a[:, j], _minor2(F, b, c, i, k)]]],
            mul[a[:, k], _minor2(F, b, c, i, j)],
        ]
        ok &= det == 0
    return ok


def label_lines(F: FqField, pts: np.ndarray, k: int = 1) -> np.ndarray:
    """Stratum codes 0..3 (XP1, XBw1, XBw2, NotInY) of perp(line) for each row of pts."""
    fr = F.np_frob
    for _ in range(k - 1):
        fr = F.np_frob[fr]
    sx = fr[pts]
    ssx = fr[sx]
    member = _vec_form(F, pts, sx) == 0
    stable = _parallel(F, pts, sx)
    meet_stable = _rank_below_three(F, pts, sx, ssx)
    codes = np.full(len(pts), 3, dtype=np.int8)
    codes[member & ~stable & ~meet_stable] = 2
    codes[member & ~stable & meet_stable] = 1
    codes[member & stable] = 0
    return codes


LABEL_ORDER = (StratumLabel.XP1, StratumLabel.XBw1, StratumLabel.XBw2, StratumLabel.NotInY)


def count_strata(p: int, d: int) -> dict[StratumLabel, int]:
    """Exhaustive counts of 3-dimensional subspaces of F_{p^d}^4 per label."""
    F = field(p, d)
    codes = label_lines(F, projective_points(F, 4))
    counts = np.bincount(codes, minlength=4)
    return {lab: int(c) for lab, c in zip(LABEL_ORDER, counts)}


def surface_points(F: FqField) -> np.ndarray:
    """Boolean mask over projective_points(F, 4) of the surface equation."""
    pts = projective_points(F, 4)
    fr, mul, add, neg = F.np_frob, F.np_mul, F.np_add, F.np_neg
    x0, x1, x2, x3 = (pts[:, i] for i in range(4))
    t1 = add[mul[fr[x3], x0], neg[mul[fr[x0], x3]]]
    t2 = add[mul[fr[x2], x1], neg[mul[fr[x1], x2]]]
    return add[t1, t2] == 0


def components_w1(p: int) -> list[tuple[FqSubspace, list[FqSubspace]]]:
    """Rational totally isotropic planes, each with the rational lines it contains."""
    lines = list(iter_subspaces(p, 1, 4, 1))
    out = []
    for T in iter_subspaces(p, 1, 4, 2):
        if perp(T) == T:
            out.append((T, [ell for ell in lines if ell <= T]))
    return out


def iter_three_spaces(p: int, d: int):
    return iter_subspaces(p, d, 4, 3)
