"""Vertex lattices of the Sp(4) building: classification, links, balls.

Vertices are normalized lattices with pL^v <= L <= L^v, so incidence is
plain containment between vertices of different type.  Neighbours are
produced by lifting subspaces of the relevant residue space and keeping the
lifts that classify with the requested type.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .fq import FqSubspace, iter_rref, field, pivots
from .lattice import Lattice, SemilinearOp, SympSpace, apply_semilinear, colength, dual


@dataclass(frozen=True)
class VertexLattice:
    lat: Lattice
    vtype: int

    def __lt__(self, other: VertexLattice) -> bool:
        return (self.lat.key, self.vtype) < (other.lat.key, other.vtype)


@dataclass(frozen=True)
class TypePair02:
    L0: VertexLattice
    L2: VertexLattice
    compat: bool


def classify_vertex(lat: Lattice) -> int | None:
    dl = dual(lat)
    if dl == lat:
        return 0
    pd = dl.scaled(1)
    if pd == lat:
        return 2
    if pd <= lat and lat <= dl and colength(pd, lat) == 2 and colength(lat, dl) == 2:
        return 1
    return None


def vertex(lat: Lattice) -> VertexLattice:
    t = classify_vertex(lat)
    if t is None:
        raise ValueError("lattice is not a vertex lattice")
    return VertexLattice(lat, t)


# --- residue spaces -------------------------------------------------------------


def residue_image(inner: Lattice, outer: Lattice) -> FqSubspace:
    """Image of inner in outer / p*outer, as coordinates in outer's basis."""
    ctx = outer.ctx
    vecs = []
    for c in inner.cols:
        co = outer.coordinates(c, inner.scale)
        if co is None:
            raise ValueError("inner lattice is not contained in outer lattice")
        vecs.append([ctx.residue_index(x) for x in co])
    return FqSubspace.span(ctx.p, ctx.d, vecs, outer.space.n)


def lift(outer: Lattice, vec: tuple[int, ...]) -> list:
    """A lattice vector (relative to outer.scale) reducing to vec in outer/p*outer."""
    ctx, n = outer.ctx, outer.space.n
    out = [ctx.zero] * n
    for c, col in zip(vec, outer.cols):
        if c:
            a = ctx.from_residue_index(c)
            out = [ctx.add(x, ctx.mul(a, y)) for x, y in zip(out, col)]
    return out


def lattice_from_residue(inner: Lattice, outer: Lattice, sub: FqSubspace) -> Lattice:
    """inner + lifts of sub (needs p*outer <= inner <= outer)."""
    e = min(inner.scale, outer.scale)
    cols = inner.columns_at(e)
    shift = outer.scale - e
    ctx = outer.ctx
    for v in sub.basis:
        cols.append([ctx.mulp(x, shift) for x in lift(outer, v)])
    return Lattice.span(outer.space, cols, e)


def supspaces(base: FqSubspace, k: int) -> Iterator[FqSubspace]:
    """All k-dimensional subspaces containing base, in a deterministic order."""
    F = field(base.p, base.d)
    n = base.n
    free = [c for c in range(n) if c not in pivots(base.basis)]
    for rows in iter_rref(F, len(free), k - base.dim):
        vecs = []
        for r in rows:
            v = [0] * n
            for c, x in zip(free, r):
                v[c] = x
            vecs.append(v)
        yield FqSubspace.span(base.p, base.d, list(base.basis) + vecs, n)


def intermediate_lattices(inner: Lattice, outer: Lattice, colen: int) -> list[Lattice]:
    """Lattices X with inner <= X <= outer and colength(inner, X) = colen (p*outer <= inner)."""
    base = residue_image(inner, outer)
    return [lattice_from_residue(inner, outer, U) for U in supspaces(base, base.dim + colen)]


_LINKS = {
    # (source type, target type) -> (inner, outer, colength from inner)
    (1, 0): lambda L: (L, dual(L), 1),
    (1, 2): lambda L: (dual(L).scaled(1), L, 1),
    (0, 1): lambda L: (L.scaled(1), L, 3),
    (0, 2): lambda L: (L.scaled(1), L, 2),
    (2, 1): lambda L: (L, dual(L), 1),
    (2, 0): lambda L: (L, dual(L), 2),
}


def neighbors(v: VertexLattice, target: int) -> list[VertexLattice]:
    key = (v.vtype, target)
    if key not in _LINKS:
        raise ValueError(f"no direct incidences between types {v.vtype} and {target}")
    inner, outer, k = _LINKS[key](v.lat)
    out = []
    for lat in intermediate_lattices(inner, outer, k):
        if classify_vertex(lat) == target:
            out.append(VertexLattice(lat, target))
    return sorted(out)


def incident(u: VertexLattice, v: VertexLattice) -> bool:
    if u.vtype == v.vtype:
        return False
    return u.lat <= v.lat or v.lat <= u.lat


@dataclass
class BallGraph:
    base: VertexLattice
    radius: int
    nodes: list[VertexLattice]
    dist: dict[VertexLattice, int]
    edges: set[tuple[int, int]]

    def count_by_type(self) -> dict[int, int]:
        out = {0: 0, 1: 0, 2: 0}
        for v in self.nodes:
            out[v.vtype] += 1
        return out

    def index(self, v: VertexLattice) -> int:
        return self.nodes.index(v)

    def of_type(self, t: int) -> list[VertexLattice]:
        return [v for v in self.nodes if v.vtype == t]


def all_neighbors(v: VertexLattice) -> list[VertexLattice]:
    return [w for t in (0, 1, 2) if (v.vtype, t) in _LINKS for w in neighbors(v, t)]


def enumerate_ball(base: VertexLattice, radius: int, strategy: str = "bfs") -> BallGraph:
    """Vertices within ``radius`` incidence steps of base, with the incidences among them."""
    if radius > 2:
        raise ValueError("ball radius is limited to 2")
    cache: dict[VertexLattice, list[VertexLattice]] = {}

    def nbrs(v: VertexLattice) -> list[VertexLattice]:
        if v not in cache:
            cache[v] = all_neighbors(v)
        return cache[v]

    dist = {base: 0}
    if strategy == "bfs":
        queue = deque([base])
        while queue:
            v = queue.popleft()
            if dist[v] == radius:
                continue
            for w in nbrs(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
    elif strategy == "dfs":
        stack = [base]
        while stack:
            v = stack.pop()
            if dist[v] == radius:
                continue
            for w in nbrs(v):
                if w not in dist or dist[w] > dist[v] + 1:
                    dist[w] = dist[v] + 1
                    stack.append(w)
    else:
        raise ValueError(f"unknown strategy {strategy}")
    nodes = sorted(dist)
    pos = {v: i for i, v in enumerate(nodes)}
    edges = set()
    for v in nodes:
        for w in nbrs(v):
            if w in pos:
                i, j = pos[v], pos[w]
                edges.add((min(i, j), max(i, j)))
    return BallGraph(base, radius, nodes, dist, edges)


# --- the Pi operator of the unramified-quadratic building -----------------------


def standard_pi(space: SympSpace) -> SemilinearOp:
    """Block antidiagonal [[0, I], [pI, 0]] composed with sigma; Pi * sigma(Pi) = p."""
    p, n = space.ctx.p, space.n
    h = n // 2
    mat = [[0] * n for _ in range(n)]
    for i in range(h):
        mat[i][h + i] = 1
        mat[h + i][i] = p
    return SemilinearOp.from_int(space, mat, 1)


def pair_check(L0: VertexLattice, L2: VertexLattice, Pi: SemilinearOp) -> bool:
    if L0.vtype != 0 or L2.vtype != 2:
        raise ValueError("pair_check expects a type-0 and a type-2 vertex")
    return apply_semilinear(Pi, L0.lat) == L2.lat


def make_pair(L0: VertexLattice, Pi: SemilinearOp) -> TypePair02:
    L2 = vertex(apply_semilinear(Pi, L0.lat))
    return TypePair02(L0, L2, pair_check(L0, L2, Pi))
