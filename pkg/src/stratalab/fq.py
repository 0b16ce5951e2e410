"""Finite fields F_q (q = p^d) as lookup tables, and subspaces of F_q^n.

Field elements are integers in [0, q) using the base-p digit encoding of
``RingCtx.residue_index``, so the field is literally the residue field of the
matching Witt ring.  Subspaces are stored as reduced row echelon matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .ring import RingCtx, make_ring

Vec = tuple[int, ...]


class FqField:
    """Arithmetic tables for F_{p^d}."""

    def __init__(self, p: int, d: int) -> None:
        self.p = p
        self.d = d
        self.q = p**d
        self.ring: RingCtx = make_ring(p, d, 1)
        ring, q = self.ring, self.q
        elems = [ring.from_residue_index(i) for i in range(q)]
        idx = ring.residue_index
        self.add_t = [[idx(ring.add(a, b)) for b in elems] for a in elems]
        self.mul_t = [[idx(ring.mul(a, b)) for b in elems] for a in elems]
        self.neg_t = [idx(ring.neg(a)) for a in elems]
        self.sub_t = [[self.add_t[a][self.neg_t[b]] for b in range(q)] for a in range(q)]
        self.inv_t = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self.mul_t[a][b] == 1:
                    self.inv_t[a] = b
                    break
        self.frob_t = [idx(ring.frob(a, 1)) for a in elems]

    @cached_property
    def np_add(self) -> np.ndarray:
        return np.array(self.add_t, dtype=np.int32)

    @cached_property
    def np_mul(self) -> np.ndarray:
        return np.array(self.mul_t, dtype=np.int32)

    @cached_property
    def np_neg(self) -> np.ndarray:
        return np.array(self.neg_t, dtype=np.int32)

    @cached_property
    def np_frob(self) -> np.ndarray:
        return np.array(self.frob_t, dtype=np.int32)

    def frob_power(self, a: int, k: int) -> int:
        for _ in range(k % self.d if self.d else 0):
            a = self.frob_t[a]
        return a

    def rational_elements(self) -> list[int]:
        """Elements of the prime field F_p inside F_q."""
        return [a for a in range(self.q) if self.frob_t[a] == a]

    # vector helpers
    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        add, mul = self.add_t, self.mul_t
        s = 0
        for a, b in zip(u, v):
            if a and b:
                s = add[s][mul[a][b]]
        return s

    def form(self, gram: Sequence[Sequence[int]], u: Sequence[int], v: Sequence[int]) -> int:
        return self.dot(u, self.mat_vec(gram, v))

    def mat_vec(self, mat: Sequence[Sequence[int]], v: Sequence[int]) -> Vec:
        return tuple(self.dot(row, v) for row in mat)

    def scale_vec(self, c: int, v: Sequence[int]) -> Vec:
        mul = self.mul_t[c]
        return tuple(mul[a] for a in v)

    def frob_vec(self, v: Sequence[int], k: int = 1) -> Vec:
        return tuple(self.frob_power(a, k) for a in v)


@lru_cache(maxsize=None)
def field(p: int, d: int) -> FqField:
    return FqField(p, d)


def rref(F: FqField, rows: Sequence[Sequence[int]]) -> tuple[Vec, ...]:
    """Reduced row echelon form with zero rows removed."""
    mat = [list(r) for r in rows]
    if not mat:
        return ()
    n = len(mat[0])
    add, mul, neg, inv = F.add_t, F.mul_t, F.neg_t, F.inv_t
    out: list[list[int]] = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        s = inv[mat[r][c]]
        mat[r] = [mul[s][x] for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = neg[mat[i][c]]
                mf = mul[f]
                mat[i] = [add[x][mf[y]] for x, y in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    out = mat[:r]
    return tuple(tuple(row) for row in out)


def pivots(rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    return tuple(next(i for i, x in enumerate(row) if x) for row in rows)


def annihilator(F: FqField, rows: Sequence[Sequence[int]], n: int) -> tuple[Vec, ...]:
    """Basis (in RREF) of {v : u . v = 0 for every row u}."""
    red = rref(F, rows)
    piv = pivots(red)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for fcol in free:
        v = [0] * n
        v[fcol] = 1
        for row, pc in zip(red, piv):
            v[pc] = F.neg_t[row[fcol]]
        basis.append(v)
    return rref(F, basis)


@dataclass(frozen=True)
class FqSubspace:
    """A subspace of F_q^n in reduced row echelon form."""

    p: int
    d: int
    n: int
    basis: tuple[Vec, ...]

    @property
    def q(self) -> int:
        return self.p**self.d

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def field(self) -> FqField:
        return field(self.p, self.d)

    @classmethod
    def span(cls, p: int, d: int, vectors: Sequence[Sequence[int]], n: int | None = None) -> FqSubspace:
        F = field(p, d)
        if n is None:
            n = len(vectors[0])
        return cls(p, d, n, rref(F, [tuple(v) for v in vectors]))

    @classmethod
    def zero(cls, p: int, d: int, n: int) -> FqSubspace:
        return cls(p, d, n, ())

    @classmethod
    def whole(cls, p: int, d: int, n: int) -> FqSubspace:
        return cls(p, d, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def __add__(self, other: FqSubspace) -> FqSubspace:
        return FqSubspace(self.p, self.d, self.n, rref(self.field, self.basis + other.basis))

    def __and__(self, other: FqSubspace) -> FqSubspace:
        F = self.field
        a = annihilator(F, self.basis, self.n) + annihilator(F, other.basis, self.n)
        return FqSubspace(self.p, self.d, self.n, annihilator(F, a, self.n))

    def __le__(self, other: FqSubspace) -> bool:
        return (self + other).dim == other.dim

    def contains(self, v: Sequence[int]) -> bool:
        return len(rref(self.field, self.basis + (tuple(v),))) == self.dim

    def frobenius(self, k: int = 1) -> FqSubspace:
        F = self.field
        return FqSubspace(self.p, self.d, self.n, rref(F, [F.frob_vec(r, k) for r in self.basis]))

    def perp(self, gram: Sequence[Sequence[int]]) -> FqSubspace:
        F = self.field
        # (u, v) = u^T G v, so v is orthogonal to u iff (G^T u) . v = 0
        gt = [list(col) for col in zip(*gram)]
        rows = [F.mat_vec(gt, u) for u in self.basis]
        return FqSubspace(self.p, self.d, self.n, annihilator(F, rows, self.n))

    def is_rational(self) -> bool:
        """Defined over the prime field (stable under x -> x^p)."""
        return self.frobenius(1) == self

    def key(self) -> tuple:
        return self.basis

    def serialize(self) -> list[list[int]]:
        return [list(r) for r in self.basis]


def iter_rref(F: FqField, n: int, k: int, values: Sequence[int] | None = None) -> Iterator[tuple[Vec, ...]]:
    """All k-dimensional subspaces of F^n as RREF matrices, in lexicographic order.

    ``values`` restricts the free entries (e.g. to the prime field, which
    yields exactly the rational subspaces).
    """
    vals = list(range(F.q)) if values is None else sorted(values)
    found = []
    for piv in combinations(range(n), k):
        slots = [(i, c) for i in range(k) for c in range(piv[i] + 1, n) if c not in piv]
        for fill in product(vals, repeat=len(slots)):
            rows = [[0] * n for _ in range(k)]
            for i, c in enumerate(piv):
                rows[i][c] = 1
            for (i, c), v in zip(slots, fill):
                rows[i][c] = v
            found.append(tuple(tuple(r) for r in rows))
    found.sort()
    yield from found


def iter_subspaces(p: int, d: int, n: int, k: int, rational: bool = False) -> Iterator[FqSubspace]:
    F = field(p, d)
    values = F.rational_elements() if rational else None
    for rows in iter_rref(F, n, k, values):
        yield FqSubspace(p, d, n, rows)


def projective_points(F: FqField, n: int) -> np.ndarray:
    """All normalized representatives of P^{n-1}(F_q) as an (N, n) array.

    Normalization: first nonzero coordinate equals 1; rows are in
    lexicographic order (which matches the RREF order of lines).
    """
    q = F.q
    blocks = []
    for lead in range(n):
        tail = n - lead - 1
        count = q**tail
        block = np.zeros((count, n), dtype=np.int32)
        block[:, lead] = 1
        if tail:
            grid = np.indices((q,) * tail).reshape(tail, -1).T
            block[:, lead + 1 :] = grid
        blocks.append(block)
    pts = np.concatenate(blocks)
    order = np.lexsort(pts.T[::-1])
    return pts[order]
