"""Full-rank lattices over W/p^m inside a symplectic space.

A lattice is ``p^scale * span(cols)`` where ``cols`` is a lower-triangular
column echelon basis: column i has zeros above row i, the pivot entry
``cols[i][i]`` is exactly ``p^pivots[i]``, and every entry to the left of a
pivot is reduced coefficient-wise modulo that pivot.  The scale is chosen
so the basis is integral and primitive.  Equal lattices have equal
canonical data, so equality and hashing are structural.

Everything is exact as long as no relevant p-adic digit falls off the
top of the fixed precision; ``check_guard`` enforces the margin.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .ring import Coeffs, PrecisionError, RingCtx

Column = tuple[Coeffs, ...]


@dataclass(frozen=True)
class SympSpace:
    """Ambient space W^n with an alternating unimodular Gram matrix."""

    ctx: RingCtx
    n: int
    gram: tuple[tuple[Coeffs, ...], ...] = field(repr=False)

    @classmethod
    def standard(cls, ctx: RingCtx, n: int = 4) -> SympSpace:
        """Antidiagonal form: +1 above the centre, -1 below."""
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i + j == n - 1:
                    row.append(ctx.const(1 if i < j else -1))
                else:
                    row.append(ctx.zero)
            rows.append(tuple(row))
        return cls(ctx, n, tuple(rows))

    @classmethod
    def from_int_gram(cls, ctx: RingCtx, gram: Sequence[Sequence[int]]) -> SympSpace:
        n = len(gram)
        g = tuple(tuple(ctx.const(x) for x in row) for row in gram)
        space = cls(ctx, n, g)
        space.validate()
        return space

    def validate(self) -> None:
        ctx = self.ctx
        for i in range(self.n):
            for j in range(self.n):
                if ctx.add(self.gram[i][j], self.gram[j][i]) != ctx.zero:
                    raise ValueError("gram matrix is not antisymmetric")
        if smith_valuations(ctx, [list(r) for r in self.gram]) != [0] * self.n:
            raise ValueError("gram matrix is not unimodular")

    def pair(self, x: Sequence[Coeffs], y: Sequence[Coeffs]) -> Coeffs:
        ctx = self.ctx
        acc = ctx.zero
        for i, xi in enumerate(x):
            if any(xi):
                row = self.gram[i]
                for j, yj in enumerate(y):
                    if any(row[j]) and any(yj):
                        acc = ctx.add(acc, ctx.mul(xi, ctx.mul(row[j], yj)))
        return acc

    def with_ctx(self, ctx: RingCtx) -> SympSpace:
        """Same integer Gram matrix over another precision of the same ring."""
        return SympSpace(ctx, self.n, tuple(tuple(ctx.const(self._as_int(x)) for x in row) for row in self.gram))

    def _as_int(self, x: Coeffs) -> int:
        v = x[0]
        return v - self.ctx.modulus if v > self.ctx.modulus // 2 else v


# --- echelon and Smith kernels ------------------------------------------------


def _echelon(ctx: RingCtx, n: int, columns: Iterable[Sequence[Coeffs]]) -> tuple[list[list[Coeffs]], list[int]]:
    """Canonical lower-triangular column echelon form of the span of columns."""
    m, p = ctx.m, ctx.p
    val, mul, sub, divp = ctx.val, ctx.mul, ctx.sub, ctx.divp
    work = [list(c) for c in columns if any(any(x) for x in c)]
    out: list[list[Coeffs]] = []
    piv: list[int] = []
    for i in range(n):
        best, bv = -1, m
        for j, c in enumerate(work):
            v = val(c[i])
            if v < bv:
                best, bv = j, v
                if v == 0:
                    break
        if best < 0:
            raise PrecisionError("lattice is not of full rank at this precision")
        c = work.pop(best)
        if bv:
            u = divp(c[i], bv)
        else:
            u = c[i]
        if u != ctx.one:
            uinv = ctx.inv(u)
            c = [x if r < i else mul(x, uinv) for r, x in enumerate(c)]
        c[i] = ctx.const(p**bv)
        for w in work:
            a = w[i]
            if any(a):
                f = divp(a, bv) if bv else a
                for r in range(i, n):
                    cr = c[r]
                    if any(cr):
                        w[r] = sub(w[r], mul(f, cr))
        out.append(c)
        piv.append(bv)
    for j in range(n):
        col = out[j]
        for i in range(j + 1, n):
            if piv[i] == 0:
                if any(col[i]):
                    f = col[i]
                    ci = out[i]
                    for r in range(i, n):
                        if any(ci[r]):
                            col[r] = sub(col[r], mul(f, ci[r]))
                continue
            rem, quot = ctx.reduce_mod_pk(col[i], piv[i])
            if any(quot):
                ci = out[i]
                for r in range(i + 1, n):
                    if any(ci[r]):
                        col[r] = sub(col[r], mul(quot, ci[r]))
                col[i] = rem
    return out, piv


def smith_valuations(ctx: RingCtx, mat: Sequence[Sequence[Coeffs]]) -> list[int]:
    """Valuations of the Smith normal form diagonal of a square matrix (rows)."""
    vals, _ = _smith(ctx, mat, track=False)
    return sorted(vals)


def _smith(ctx: RingCtx, mat: Sequence[Sequence[Coeffs]], track: bool) -> tuple[list[int], list[list[Coeffs]]]:
    """Diagonalize R * A * T by unimodular R, T; returns pivot valuations and T (rows)."""
    n = len(mat)
    m = ctx.m
    val, mul, sub, divp = ctx.val, ctx.mul, ctx.sub, ctx.divp
    a = [list(r) for r in mat]
    t = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)] if track else []
    vals = []
    for k in range(n):
        bi, bj, bv = -1, -1, m
        for i in range(k, n):
            row = a[i]
            for j in range(k, n):
                v = val(row[j])
                if v < bv:
                    bi, bj, bv = i, j, v
            if bv == 0:
                break
        if bi < 0:
            raise PrecisionError("matrix is singular at this precision")
        a[k], a[bi] = a[bi], a[k]
        if bj != k:
            for row in a:
                row[k], row[bj] = row[bj], row[k]
            for row in t:
                row[k], row[bj] = row[bj], row[k]
        u = divp(a[k][k], bv) if bv else a[k][k]
        uinv = ctx.inv(u)
        a[k] = [x if j < k else mul(x, uinv) for j, x in enumerate(a[k])]
        a[k][k] = ctx.const(ctx.p**bv)
        pivrow = a[k]
        for i in range(k + 1, n):
            x = a[i][k]
            if any(x):
                f = divp(x, bv) if bv else x
                row = a[i]
                for j in range(k, n):
                    if any(pivrow[j]):
                        row[j] = sub(row[j], mul(f, pivrow[j]))
        for j in range(k + 1, n):
            x = pivrow[j]
            if any(x):
                f = divp(x, bv) if bv else x
                pivrow[j] = ctx.zero
                for row in t:
                    if any(row[k]):
                        row[j] = sub(row[j], mul(f, row[k]))
        vals.append(bv)
    return vals, t


# --- lattices -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Lattice:
    space: SympSpace
    scale: int
    cols: tuple[Column, ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, space: SympSpace, columns: Iterable[Sequence[Coeffs]], scale: int = 0) -> Lattice:
        ctx, n = space.ctx, space.n
        cols, piv = _echelon(ctx, n, columns)
        low = min(ctx.val(x) for c in cols for x in c)
        if low:
            cols = [[ctx.divp(x, low) for x in c] for c in cols]
            piv = [v - low for v in piv]
            scale += low
        lat = cls(space, scale, tuple(tuple(c) for c in cols), tuple(piv))
        lat.check_guard()
        return lat

    @classmethod
    def from_int_columns(cls, space: SympSpace, columns: Sequence[Sequence[int]], scale: int = 0) -> Lattice:
        ctx = space.ctx
        return cls.span(space, [[ctx.const(x) for x in c] for c in columns], scale)

    @classmethod
    def diagonal(cls, space: SympSpace, exps: Sequence[int], scale: int = 0) -> Lattice:
        ctx, n = space.ctx, space.n
        cols = [[ctx.const(ctx.p ** exps[i]) if r == i else ctx.zero for r in range(n)] for i in range(n)]
        return cls.span(space, cols, scale)

    @classmethod
    def standard(cls, space: SympSpace) -> Lattice:
        return cls.diagonal(space, [0] * space.n)

    def check_guard(self) -> None:
        """Require p^(m-2) * p^scale * W^n <= self, so images under p-integral maps stay faithful."""
        ctx, n = self.space.ctx, self.space.n
        limit = ctx.m - 2
        if max(self.pivots) > limit:
            raise PrecisionError(f"pivot valuation {max(self.pivots)} exceeds guard {limit}")
        # columns i.. span a lattice of index p^(pivots[i] + ...) in the trailing coordinates,
        # so p^limit e_i is certainly in L when that suffix sum is at most limit
        suffix = 0
        unit = None
        for i in range(n - 1, -1, -1):
            suffix += self.pivots[i]
            if suffix <= limit:
                continue
            if unit is None:
                unit = ctx.const(ctx.p**limit)
            vec = [unit if r == i else ctx.zero for r in range(n)]
            if self.coordinates(vec, self.scale) is None:
                raise PrecisionError(f"exponent of the lattice quotient exceeds guard {limit}")

    # -- identity ------------------------------------------------------------
    @cached_property
    def key(self) -> tuple:
        return (self.scale, self.cols)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.space == other.space and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: Lattice) -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        return f"Lattice(scale={self.scale}, pivots={list(self.pivots)})"

    def serialize(self) -> dict:
        return {"scale": self.scale, "cols": [[list(x) for x in c] for c in self.cols]}

    @property
    def ctx(self) -> RingCtx:
        return self.space.ctx

    @property
    def volume(self) -> int:
        """Valuation of the determinant: colength of self in p^0-standard, signed."""
        return self.space.n * self.scale + sum(self.pivots)

    def scaled(self, k: int) -> Lattice:
        """p^k * self."""
        return Lattice(self.space, self.scale + k, self.cols, self.pivots)

    def columns_at(self, scale: int) -> list[list[Coeffs]]:
        """Basis columns written relative to p^scale (requires scale <= self.scale)."""
        k = self.scale - scale
        if k < 0:
            raise ValueError("cannot express a lattice at a finer scale than its own")
        ctx = self.ctx
        return [[ctx.mulp(x, k) for x in c] for c in self.cols]

    # -- membership ------------------------------------------------------------
    def coordinates(self, vec: Sequence[Coeffs], vec_scale: int = 0) -> list[Coeffs] | None:
        """Coefficients of p^vec_scale * vec in this basis, or None if not a member."""
        ctx, n = self.ctx, self.space.n
        shift = vec_scale - self.scale
        if shift >= 0:
            x = [ctx.mulp(v, shift) for v in vec]
        else:
            if min(ctx.val(v) for v in vec) < -shift:
                if any(any(v) for v in vec):
                    return None
            x = [ctx.divp(v, -shift) for v in vec]
        coeffs = []
        for i in range(n):
            col = self.cols[i]
            pv = self.pivots[i]
            xi = x[i]
            if ctx.val(xi) < pv:
                return None
            c = ctx.divp(xi, pv) if pv else xi
            coeffs.append(c)
            if any(c):
                for r in range(i, n):
                    if any(col[r]):
                        x[r] = ctx.sub(x[r], ctx.mul(c, col[r]))
        return coeffs

    def contains_vector(self, vec: Sequence[Coeffs], vec_scale: int = 0) -> bool:
        return self.coordinates(vec, vec_scale) is not None

    def __le__(self, other: Lattice) -> bool:
        """Containment self <= other."""
        if self.volume < other.volume:
            return False
        return all(other.contains_vector(c, self.scale) for c in self.cols)

    def __ge__(self, other: Lattice) -> bool:
        return other <= self


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    e = min(a.scale, b.scale)
    return Lattice.span(a.space, a.columns_at(e) + b.columns_at(e), e)


def dual(lat: Lattice) -> Lattice:
    """Integral dual {x : (x, lat) in W}, via Smith form of B^T G^T."""
    space, ctx, n = lat.space, lat.ctx, lat.space.n
    gram = space.gram
    # M[j][i] = (e_i, b_j) = sum_k G[i][k] b_j[k]   -> row j of B^T G^T
    mat = []
    for col in lat.cols:
        row = []
        for i in range(n):
            acc = ctx.zero
            gi = gram[i]
            for k in range(n):
                if any(gi[k]) and any(col[k]):
                    acc = ctx.add(acc, ctx.mul(gi[k], col[k]))
            row.append(acc)
        mat.append(row)
    vals, t = _smith(ctx, mat, track=True)
    top = max(vals)
    cols = []
    for k, v in enumerate(vals):
        cols.append([ctx.mulp(t[r][k], top - v) for r in range(n)])
    return Lattice.span(space, cols, -lat.scale - top)


def lattice_intersect(a: Lattice, b: Lattice) -> Lattice:
    """Largest common sublattice, via duality."""
    return dual(lattice_sum(dual(a), dual(b)))


def lattice_intersect_kernel(a: Lattice, b: Lattice) -> Lattice:
    """Largest common sublattice, via a Zassenhaus-style kernel computation.

    The span of (x, x) for x in a together with (y, 0) for y in b meets
    0 + W^n exactly in 0 + (a cap b); an echelon form that clears the first
    n coordinates first exposes that piece.
    """
    ctx, n = a.ctx, a.space.n
    e = min(a.scale, b.scale)
    ca, cb = a.columns_at(e), b.columns_at(e)
    gens = [c + c for c in ca] + [c + [ctx.zero] * n for c in cb]
    cols, _ = _echelon(ctx, 2 * n, gens)
    tail = [c[n:] for c in cols[n:]]
    return Lattice.span(a.space, tail, e)


def colength(inner: Lattice, outer: Lattice) -> int:
    """W-length of outer / inner; raises if inner is not contained in outer."""
    if not inner <= outer:
        raise ValueError("inner lattice is not contained in outer lattice")
    return inner.volume - outer.volume


def colength_smith(inner: Lattice, outer: Lattice) -> int:
    """Same quantity from Smith valuations of the two bases (independent route)."""
    if not inner <= outer:
        raise ValueError("inner lattice is not contained in outer lattice")
    ctx, n = inner.ctx, inner.space.n
    rows_in = [list(r) for r in zip(*inner.cols)]
    rows_out = [list(r) for r in zip(*outer.cols)]
    return (n * inner.scale + sum(smith_valuations(ctx, rows_in))) - (
        n * outer.scale + sum(smith_valuations(ctx, rows_out))
    )


# --- semilinear operators ------------------------------------------------------


@dataclass(frozen=True)
class SemilinearOp:
    """v -> mat * sigma^twist(v); ``mat`` is stored by rows."""

    space: SympSpace
    mat: tuple[tuple[Coeffs, ...], ...]
    twist: int = 0

    @classmethod
    def from_int(cls, space: SympSpace, mat: Sequence[Sequence[int]], twist: int = 0) -> SemilinearOp:
        ctx = space.ctx
        return cls(space, tuple(tuple(ctx.const(x) for x in row) for row in mat), twist % ctx.d)

    @classmethod
    def identity(cls, space: SympSpace, twist: int = 0) -> SemilinearOp:
        n = space.n
        return cls.from_int(space, [[int(i == j) for j in range(n)] for i in range(n)], twist)

    def apply_vector(self, v: Sequence[Coeffs]) -> list[Coeffs]:
        ctx = self.space.ctx
        w = [ctx.frob(x, self.twist) for x in v]
        out = []
        for row in self.mat:
            acc = ctx.zero
            for a, b in zip(row, w):
                if any(a) and any(b):
                    acc = ctx.add(acc, ctx.mul(a, b))
            out.append(acc)
        return out

    def compose(self, other: SemilinearOp) -> SemilinearOp:
        """self o other = (A * sigma^s(B), s + t)."""
        ctx, n = self.space.ctx, self.space.n
        s = self.twist
        b = [[ctx.frob(x, s) for x in row] for row in other.mat]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = ctx.zero
                for k in range(n):
                    acc = ctx.add(acc, ctx.mul(self.mat[i][k], b[k][j]))
                row.append(acc)
            rows.append(tuple(row))
        return SemilinearOp(self.space, tuple(rows), (s + other.twist) % ctx.d)

    def __matmul__(self, other: SemilinearOp) -> SemilinearOp:
        return self.compose(other)

    def scaled(self, k: int) -> SemilinearOp:
        ctx = self.space.ctx
        return SemilinearOp(self.space, tuple(tuple(ctx.mulp(x, k) for x in row) for row in self.mat), self.twist)


def apply_semilinear(op: SemilinearOp, lat: Lattice) -> Lattice:
    cols = [op.apply_vector(c) for c in lat.cols]
    return Lattice.span(lat.space, cols, lat.scale)
