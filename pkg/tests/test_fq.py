from __future__ import annotations

from itertools import product

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from stratalab.fq import FqSubspace, field, iter_subspaces, projective_points


def gauss_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def test_f9_tables_match_polynomial_arithmetic():
    # F_9 = F_3[x] / (x^2 + 1); index a0 + 3 a1 encodes a0 + a1 x
    x = sympy.symbols("x")
    mod = sympy.Poly(x**2 + 1, x, modulus=3)
    F = field(3, 2)

    def poly(i):
        return sympy.Poly(i % 3 + (i // 3) * x, x, modulus=3)

    def index(P):
        c = [int(v) % 3 for v in reversed(P.all_coeffs())] + [0, 0]
        return c[0] + 3 * c[1]

    for a, b in product(range(9), repeat=2):
        assert F.mul_t[a][b] == index((poly(a) * poly(b)).rem(mod))
        assert F.add_t[a][b] == index(poly(a) + poly(b))
    for a in range(9):
        assert F.frob_t[a] == index((poly(a) ** 3).rem(mod))


@pytest.mark.parametrize("p,d", [(3, 1), (3, 2), (5, 1), (3, 4)])
def test_field_axioms(p, d):
    F = field(p, d)
    q = F.q
    for a in range(1, q):
        assert F.mul_t[a][F.inv_t[a]] == 1
    assert sorted(F.rational_elements()) == sorted(a for a in range(q) if F.frob_power(a, 1) == a)
    assert len(F.rational_elements()) == p


@pytest.mark.parametrize("p,d,k", [(3, 1, 1), (3, 1, 2), (3, 1, 3), (3, 2, 2), (5, 1, 2), (3, 2, 1)])
def test_subspace_counts_are_gaussian_binomials(p, d, k):
    subs = list(iter_subspaces(p, d, 4, k))
    assert len(subs) == gauss_binomial(4, k, p**d)
    assert len({U.key() for U in subs}) == len(subs)
    rational = list(iter_subspaces(p, d, 4, k, rational=True))
    assert len(rational) == gauss_binomial(4, k, p)
    assert all(U.is_rational() for U in rational)


def test_projective_points_match_lines():
    F = field(3, 2)
    pts = projective_points(F, 4)
    lines = [U.basis[0] for U in iter_subspaces(3, 2, 4, 1)]
    assert [tuple(int(a) for a in r) for r in pts] == lines


@given(st.lists(st.lists(st.integers(0, 8), min_size=4, max_size=4), min_size=1, max_size=3))
def test_meet_and_join_dimensions(rows):
    U = FqSubspace.span(3, 2, rows)
    W = FqSubspace.span(3, 2, [[1, 2, 0, 4], [0, 0, 1, 3]])
    assert (U + W).dim + (U & W).dim == U.dim + W.dim
    assert U & W <= U and U <= U + W
    assert all(U.contains(v) for v in rows)
