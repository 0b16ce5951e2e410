"""Finite-level models of the quaternionic and paramodular Rapoport-Zink point sets.

Quaternionic points are lattices D in a 4-dimensional symplectic space with
pD^v <=2 D <=2 D^v and pD^v <=2 tau(D) <=2 D^v, where tau = (identity,
twist 1).  Paramodular points are lattices M with pM <=2 VM <=2 M and
pM^v <=2 M <=2 M^v for V = p Pi^{-1}.  Both are enumerated inside the window
p^r L_std <= L <= p^{-r} L_std; "points over F_{p^d}" are modelled by the
degree-d ring.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterator, Sequence

from .building import (
    VertexLattice,
    TypePair02,
    classify_vertex,
    intermediate_lattices,
    lattice_from_residue,
    pair_check,
    residue_image,
    standard_pi,
)
from .dl import (
    StratumLabel,
    classify_point_minus,
    classify_point_plus,
    label_lines,
    perp as fq_perp,
    std_gram,
)
from .fq import FqSubspace, field as fq_field, iter_subspaces, pivots, projective_points
from .lattice import (
    Lattice,
    SemilinearOp,
    SympSpace,
    apply_semilinear,
    colength,
    dual,
    lattice_intersect,
    lattice_sum,
)
from .report import CheckResult, compare, no_failures
from .ring import RingCtx, make_ring

MAX_RADIUS = 1


def default_precision(radius: int) -> int:
    return 2 * radius + 4


def _index_ok(inner: Lattice, outer: Lattice, k: int) -> bool:
    """inner <=k outer."""
    return inner.volume - outer.volume == k and inner <= outer


# --- models -----------------------------------------------------------------------


def _pi_matrix(n: int, p: int) -> list[list[int]]:
    h = n // 2
    mat = [[0] * n for _ in range(n)]
    for i in range(h):
        mat[i][h + i] = 1
        mat[h + i][i] = p
    return mat


@dataclass(frozen=True)
class QuatModel:
    """Split model: tau = (I, 1) on W^4; Pi swaps N0 and N1 in the 8-dimensional N."""

    ctx: RingCtx
    space: SympSpace
    tau: SemilinearOp
    space8: SympSpace
    Pi_full: SemilinearOp
    F_full: SemilinearOp
    V_full: SemilinearOp
    tau_full: SemilinearOp
    radius: int = 1

    @classmethod
    def build(cls, p: int, d: int, radius: int = 1, precision: int | None = None) -> QuatModel:
        ctx = make_ring(p, d, precision or default_precision(radius))
        space = SympSpace.standard(ctx)
        tau = SemilinearOp.identity(space, 1)
        g = [[_signed(ctx, x) for x in row] for row in space.gram]
        gram8 = [[0] * 8 for _ in range(8)]
        for i in range(4):
            for j in range(4):
                gram8[i][4 + j] = g[i][j]
                gram8[4 + i][j] = g[i][j]
        space8 = SympSpace.from_int_gram(ctx, gram8)
        # (x0, x1) -> (p x1, x0)
        pi = [[0] * 8 for _ in range(8)]
        for i in range(4):
            pi[i][4 + i] = p
            pi[4 + i][i] = 1
        Pi = SemilinearOp.from_int(space8, pi, 0)
        F = SemilinearOp.from_int(space8, pi, 1)
        V = SemilinearOp.from_int(space8, pi, -1)
        tau8 = SemilinearOp.identity(space8, 1)
        return cls(ctx, space, tau, space8, Pi, F, V, tau8, radius)

    @property
    def base(self) -> Lattice:
        return Lattice.standard(self.space)

    def apply_tau(self, lat: Lattice) -> Lattice:
        return apply_semilinear(self.tau, lat)

    def is_tau_stable(self, lat: Lattice) -> bool:
        return self.apply_tau(lat) == lat

    def describe(self) -> dict:
        return {
            "model": "quaternionic",
            "p": self.ctx.p,
            "deg": self.ctx.d,
            "precision": self.ctx.m,
            "tau": "identity matrix, twist 1",
            "Pi_full": "(x0, x1) -> (p x1, x0)",
            "level": f"points over F_{self.ctx.p}^{self.ctx.d}",
        }


def _signed(ctx: RingCtx, x) -> int:
    v = x[0]
    return v - ctx.modulus if v > ctx.modulus // 2 else v


@dataclass(frozen=True)
class ParamModel:
    """Pi = [[0, I], [pI, 0]] o sigma, V = p Pi^{-1}, tau2 = V^{-1} Pi = sigma^2."""

    ctx: RingCtx
    space: SympSpace
    Pi: SemilinearOp
    V: SemilinearOp
    tau2: SemilinearOp
    radius: int = 1

    @classmethod
    def build(
        cls, p: int, d: int, radius: int = 1, precision: int | None = None, strict: bool = True
    ) -> ParamModel:
        if strict and d not in (2, 4):
            raise ValueError("the paramodular model needs d in {2, 4}")
        ctx = make_ring(p, d, precision or default_precision(radius))
        space = SympSpace.standard(ctx)
        Pi = standard_pi(space)
        mat = _pi_matrix(4, p)
        # p * Pi^{-1} = sigma^{-1} o (p P^{-1}) = P o sigma^{-1}, as P is rational
        V = SemilinearOp.from_int(space, mat, -1)
        # V^{-1} = sigma o P^{-1}; composed with Pi = P o sigma this is sigma^2
        tau2 = SemilinearOp.identity(space, 2)
        return cls(ctx, space, Pi, V, tau2, radius)

    @property
    def base(self) -> Lattice:
        return Lattice.standard(self.space)

    def apply_tau(self, lat: Lattice) -> Lattice:
        return apply_semilinear(self.tau2, lat)

    def is_tau_stable(self, lat: Lattice) -> bool:
        return self.apply_tau(lat) == lat

    def describe(self) -> dict:
        return {
            "model": "paramodular",
            "p": self.ctx.p,
            "deg": self.ctx.d,
            "precision": self.ctx.m,
            "Pi": "[[0, I], [pI, 0]], twist 1",
            "V": "[[0, I], [pI, 0]], twist -1",
            "tau2": "identity matrix, twist 2",
            "level": f"points over F_{self.ctx.p}^{self.ctx.d}",
        }


def similitude_h(space: SympSpace) -> SemilinearOp:
    """The rational linear map [[0, I], [pI, 0]]: multiplier -p and h^2 = p."""
    return SemilinearOp.from_int(space, _pi_matrix(space.n, space.ctx.p), 0)


# --- point predicates ---------------------------------------------------------------


def is_quat_point(D: Lattice, model: QuatModel) -> bool:
    Dd = dual(D)
    pDd = Dd.scaled(1)
    if not (_index_ok(pDd, D, 2) and _index_ok(D, Dd, 2)):
        return False
    tD = model.apply_tau(D)
    return _index_ok(pDd, tD, 2) and _index_ok(tD, Dd, 2)


def pappas_defect(D: Lattice, model: QuatModel) -> int:
    return colength(D, lattice_sum(D, model.apply_tau(D)))


def is_param_point(M: Lattice, model: ParamModel) -> bool:
    Md = dual(M)
    if not (_index_ok(Md.scaled(1), M, 2) and _index_ok(M, Md, 2)):
        return False
    VM = apply_semilinear(model.V, M)
    return _index_ok(M.scaled(1), VM, 2) and _index_ok(VM, M, 2)


# --- window enumeration ---------------------------------------------------------------


def _lift_vec(ctx: RingCtx, v: Sequence[int]) -> list:
    return [ctx.from_residue_index(x) for x in v]


def window_lattice(space: SympSpace, X: FqSubspace, ys: Sequence[Sequence[int]], zs: Sequence[Sequence[int]]) -> Lattice:
    """pL + lift(X) + sum p^{-1}(lift(y_i) + p lift(z_i)), with L the standard lattice."""
    ctx, n = space.ctx, space.n
    p = ctx.p
    cols = []
    for j in range(n):
        cols.append([ctx.const(p * p) if r == j else ctx.zero for r in range(n)])
    for x in X.basis:
        cols.append([ctx.mulp(a, 1) for a in _lift_vec(ctx, x)])
    for y, z in zip(ys, zs):
        ly, lz = _lift_vec(ctx, y), _lift_vec(ctx, z)
        cols.append([ctx.add(a, ctx.mulp(b, 1)) for a, b in zip(ly, lz)])
    return Lattice.span(space, cols, -1)


def _complement_vectors(X: FqSubspace) -> Iterator[tuple[int, ...]]:
    """Representatives of F^n / X: vectors supported off the pivot columns of X."""
    n, q = X.n, X.q
    free = [c for c in range(n) if c not in pivots(X.basis)]
    for vals in product(range(q), repeat=len(free)):
        v = [0] * n
        for c, a in zip(free, vals):
            v[c] = a
        yield tuple(v)


def _subspaces_inside(X: FqSubspace, k: int) -> Iterator[FqSubspace]:
    F = X.field
    for S in iter_subspaces(X.p, X.d, X.dim, k):
        vecs = []
        for row in S.basis:
            v = [0] * X.n
            for c, b in zip(row, X.basis):
                if c:
                    v = [F.add_t[a][F.mul_t[c][bb]] for a, bb in zip(v, b)]
            vecs.append(v)
        yield FqSubspace.span(X.p, X.d, vecs, X.n)


def _lifted(space: SympSpace, X: FqSubspace, Y: FqSubspace) -> Iterator[Lattice]:
    comps = list(_complement_vectors(X))
    for zs in product(comps, repeat=Y.dim):
        yield window_lattice(space, X, Y.basis, zs)


def iter_window_all(space: SympSpace) -> Iterator[Lattice]:
    """Every lattice with pL <= D <= p^{-1}L (L standard): one per (X, Y, lifts)."""
    ctx, n = space.ctx, space.n
    for k in range(n + 1):
        for X in iter_subspaces(ctx.p, ctx.d, n, k):
            for j in range(k + 1):
                for Y in _subspaces_inside(X, j):
                    yield from _lifted(space, X, Y)


def window_size(p: int, d: int, n: int = 4) -> int:
    """Number of lattices in the radius-1 window, from the (X, Y, lift) count."""
    q = p**d

    def gauss(a: int, b: int) -> int:
        num = den = 1
        for i in range(b):
            num *= q ** (a - i) - 1
            den *= q ** (i + 1) - 1
        return num // den

    return sum(gauss(n, k) * gauss(k, j) * q ** (j * (n - k)) for k in range(n + 1) for j in range(k + 1))


def _residue_action(op: SemilinearOp) -> Callable[[Sequence[int]], tuple[int, ...]]:
    """The action of an integral semilinear operator on L/pL for L standard."""
    ctx = op.space.ctx
    F = fq_field(ctx.p, ctx.d)
    mat = [[ctx.residue_index(x) for x in row] for row in op.mat]
    k = op.twist % ctx.d if ctx.d else 0

    def act(v: Sequence[int]) -> tuple[int, ...]:
        return F.mat_vec(mat, F.frob_vec(v, k))

    return act


def iter_quat_candidates(model: QuatModel) -> Iterator[Lattice]:
    """Window lattices with the necessary residue shape of a quaternionic point.

    A point D has X = (D cap L)/pL and Y = (pD + pL)/pL with dim X + dim Y = 3,
    Y <= X^perp and X^perp <= X; the tau condition forces X^perp <= sigma(X), so
    in the (1, 2) case X is a rational Lagrangian plane.
    """
    ctx, space = model.ctx, model.space
    p, d = ctx.p, ctx.d
    for X in iter_subspaces(p, d, 4, 3):
        yield window_lattice(space, X, (), ())
    for X in iter_subspaces(p, d, 4, 2, rational=True):
        if fq_perp(X) != X:
            continue
        for Y in _subspaces_inside(X, 1):
            yield from _lifted(space, X, Y)


def iter_param_candidates(model: ParamModel) -> Iterator[Lattice]:
    """Window lattices with the residue shape of a paramodular point.

    On top of the type-1 shape, Pi M <= M forces the residue action of Pi to
    preserve X and Y.
    """
    ctx, space = model.ctx, model.space
    p, d = ctx.p, ctx.d
    act = _residue_action(model.Pi)

    def stable(S: FqSubspace) -> bool:
        return all(S.contains(act(v)) for v in S.basis)

    for X in iter_subspaces(p, d, 4, 3):
        if stable(X):
            yield window_lattice(space, X, (), ())
    for X in iter_subspaces(p, d, 4, 2):
        if fq_perp(X) != X or not stable(X):
            continue
        for Y in _subspaces_inside(X, 1):
            if stable(Y):
                yield from _lifted(space, X, Y)


def enumerate_ball_points(model: QuatModel | ParamModel, radius: int = 1, strategy: str = "pruned") -> list[Lattice]:
    """Census of model points in the window p^r L_std <= L <= p^{-r} L_std, sorted."""
    if radius < 0 or radius > MAX_RADIUS:
        raise ValueError(f"census radius must be 0 or 1, got {radius}")
    quat = isinstance(model, QuatModel)
    pred = (lambda L: is_quat_point(L, model)) if quat else (lambda L: is_param_point(L, model))
    if radius == 0:
        base = model.base
        return [base] if pred(base) else []
    if strategy == "pruned":
        cands = iter_quat_candidates(model) if quat else iter_param_candidates(model)
    elif strategy == "full":
        if window_size(model.ctx.p, model.ctx.d) > 200_000:
            raise ValueError("full window enumeration is limited to d = 1")
        cands = iter_window_all(model.space)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return sorted({L for L in cands if pred(L)})


def sample_window(space: SympSpace, count: int, seed: int = 0) -> list[Lattice]:
    """Deterministic pseudorandom window lattices (uniform over (X, Y, lifts) shapes)."""
    ctx, n = space.ctx, space.n
    rng = random.Random(seed)
    F = fq_field(ctx.p, ctx.d)
    out = []
    for _ in range(count):
        k = rng.randrange(n + 1)
        rows = [[rng.randrange(F.q) for _ in range(n)] for _ in range(k)]
        X = FqSubspace.span(ctx.p, ctx.d, rows, n) if rows else FqSubspace.zero(ctx.p, ctx.d, n)
        j = rng.randrange(X.dim + 1)
        ys = []
        for _ in range(j):
            c = [rng.randrange(F.q) for _ in range(X.dim)]
            v = [0] * n
            for a, b in zip(c, X.basis):
                v = [F.add_t[x][F.mul_t[a][y]] for x, y in zip(v, b)]
            ys.append(v)
        Y = FqSubspace.span(ctx.p, ctx.d, ys, n) if ys else FqSubspace.zero(ctx.p, ctx.d, n)
        comps = list(_complement_vectors(X))
        zs = [rng.choice(comps) for _ in range(Y.dim)]
        out.append(window_lattice(space, X, Y.basis, zs))
    return out


# --- crucial lemma and labels ---------------------------------------------------------


@dataclass(frozen=True)
class CrucialResult:
    lattice: Lattice
    case: str
    stable: bool
    chain_ok: bool
    vtype: int | None

    @property
    def ok(self) -> bool:
        expected = {"stable": 1, "sum": 0, "intersection": 2}[self.case]
        return self.stable and self.chain_ok and self.vtype == expected


def crucial_lattice(D: Lattice, model: QuatModel) -> CrucialResult:
    """tau-stable lattice attached to a point: D, D + tau D, or D cap tau D."""
    tD = model.apply_tau(D)
    if tD == D:
        return CrucialResult(D, "stable", True, True, classify_vertex(D))
    S = lattice_sum(D, tD)
    if model.is_tau_stable(S):
        Sd = dual(S)
        Dd = dual(D)
        # pL^v <=1 pD^v <=2 D <=1 L
        chain = (
            _index_ok(Sd.scaled(1), Dd.scaled(1), 1)
            and _index_ok(Dd.scaled(1), D, 2)
            and _index_ok(D, S, 1)
            and S <= Sd
        )
        return CrucialResult(S, "sum", True, chain, classify_vertex(S))
    I = lattice_intersect(D, tD)
    Id, Dd = dual(I), dual(D)
    # L <=1 D <=2 D^v <=1 L^v and pL^v <= L
    chain = (
        _index_ok(I, D, 1)
        and _index_ok(D, Dd, 2)
        and _index_ok(Dd, Id, 1)
        and Id.scaled(1) <= I
    )
    return CrucialResult(I, "intersection", model.is_tau_stable(I), chain, classify_vertex(I))


@dataclass(frozen=True)
class BTLabel:
    kind: str  # Q0 | Q1 | Q2 | Q02 | P02 | P1
    L0: Lattice | None = None
    L1: Lattice | None = None
    L2: Lattice | None = None

    @property
    def coarse(self) -> str:
        return {"Q02": "Q0"}.get(self.kind, self.kind)

    def witnesses(self) -> dict:
        out = {}
        for name in ("L0", "L1", "L2"):
            lat = getattr(self, name)
            if lat is not None:
                out[name] = lat.serialize()
        return out


def bt_label(D: Lattice, model: QuatModel) -> BTLabel:
    tD = model.apply_tau(D)
    if tD == D:
        return BTLabel("Q1", L1=D)
    S = lattice_sum(D, tD)
    I = lattice_intersect(D, tD)
    s_stable = model.is_tau_stable(S)
    i_stable = model.is_tau_stable(I)
    if s_stable and i_stable:
        return BTLabel("Q02", L0=S, L2=I)
    if s_stable:
        return BTLabel("Q0", L0=S)
    return BTLabel("Q2", L2=I)


def label_valid(label: BTLabel, model: QuatModel | ParamModel) -> bool:
    """Witnesses are tau-stable vertex lattices of the claimed types."""
    for name, t in (("L0", 0), ("L1", 1), ("L2", 2)):
        lat = getattr(label, name)
        if lat is not None and (classify_vertex(lat) != t or not model.is_tau_stable(lat)):
            return False
    return True


def duality_involution(D: Lattice) -> Lattice:
    """D -> h(D^v): volume-preserving, exchanges type 0 and type 2 vertices."""
    return apply_semilinear(similitude_h(D.space), dual(D))


# --- the 8-dimensional cross-check -------------------------------------------------------


def _embed(space8: SympSpace, lat: Lattice, slot: int) -> list[list]:
    ctx = space8.ctx
    z = [ctx.zero] * 4
    return [list(c) + z if slot == 0 else z + list(c) for c in lat.cols]


def _block(op: SemilinearOp, space4: SympSpace, src: int, dst: int) -> SemilinearOp:
    """The N_src -> N_dst block of an operator on N = N0 + N1."""
    rows = tuple(tuple(op.mat[4 * dst + i][4 * src + j] for j in range(4)) for i in range(4))
    return SemilinearOp(space4, rows, op.twist)


def full_module(D: Lattice, model: QuatModel) -> tuple[Lattice, Lattice, Lattice]:
    """(M, M0, M1) with M0 = D and M1 = Pi(D^v), the latter read in N1 coordinates."""
    Dd = dual(D)
    M1 = apply_semilinear(_block(model.Pi_full, model.space, 0, 1), Dd)
    e = min(D.scale, M1.scale)
    cols = _embed(model.space8, Lattice(model.space, D.scale, D.cols, D.pivots), 0)
    ctx = model.ctx
    cols = [[ctx.mulp(x, D.scale - e) for x in c] for c in cols]
    cols += [[ctx.mulp(x, M1.scale - e) for x in c] for c in _embed(model.space8, M1, 1)]
    M = Lattice.span(model.space8, cols, e)
    return M, D, M1


def full_module_conditions(D: Lattice, model: QuatModel) -> dict[str, bool]:
    M, M0, M1 = full_module(D, model)
    VM = apply_semilinear(model.V_full, M)
    s4 = model.space
    pi01, pi10 = _block(model.Pi_full, s4, 0, 1), _block(model.Pi_full, s4, 1, 0)
    v01, v10 = _block(model.V_full, s4, 0, 1), _block(model.V_full, s4, 1, 0)
    return {
        "self_dual": dual(M) == M,
        "pM<=VM": M.scaled(1) <= VM,
        "VM<=M": VM <= M,
        "PiM0<=2M1": _index_ok(apply_semilinear(pi01, M0), M1, 2),
        "PiM1<=2M0": _index_ok(apply_semilinear(pi10, M1), M0, 2),
        "VM1<=2M0": _index_ok(apply_semilinear(v10, M1), M0, 2),
        "VM0<=2M1": _index_ok(apply_semilinear(v01, M0), M1, 2),
    }


def full_module_check(D: Lattice, model: QuatModel) -> bool:
    return all(full_module_conditions(D, model).values())


def full_superspecial(D: Lattice, model: QuatModel) -> bool:
    """V M = Pi M on the 8-dimensional module."""
    M, _, _ = full_module(D, model)
    return apply_semilinear(model.V_full, M) == apply_semilinear(model.Pi_full, M)


def form_identity_holds(model: QuatModel) -> bool:
    """(F e_i, e_j) = sigma((e_i, V e_j)) on basis vectors, plus on a twisted vector."""
    ctx, s8 = model.ctx, model.space8
    basis = [[ctx.one if r == i else ctx.zero for r in range(8)] for i in range(8)]
    g = ctx.gen().coeffs
    vecs = basis + [[ctx.mul(g, x) for x in b] for b in basis]
    for x in vecs:
        Fx = model.F_full.apply_vector(x)
        for y in vecs:
            lhs = s8.pair(Fx, y)
            rhs = ctx.frob(s8.pair(x, model.V_full.apply_vector(y)), 1)
            if lhs != rhs:
                return False
    return True


# --- bijection oracles ---------------------------------------------------------------------


def residue_gram(lat: Lattice, outer_scale_shift: int = 0) -> tuple[tuple[int, ...], ...]:
    """Gram matrix of p^shift (b_i, b_j) mod p on a basis of lat."""
    ctx, space = lat.ctx, lat.space
    cols = lat.cols
    out = []
    for a in cols:
        row = []
        for b in cols:
            v = space.pair(a, b)
            k = 2 * lat.scale + outer_scale_shift
            v = ctx.mulp(v, k) if k >= 0 else ctx.divp(v, -k)
            row.append(ctx.residue_index(v))
        out.append(tuple(row))
    return tuple(out)


_DL0 = {"Q0": StratumLabel.XBw2, "Q02": StratumLabel.XBw1, "Q1": StratumLabel.XP1}
_DL2 = {"Q2": StratumLabel.XBw2, "Q02": StratumLabel.XBw1, "Q1": StratumLabel.XP1}


@dataclass
class BijectionReport:
    side: str
    level: int
    exhaustive: bool
    lattice_points: int
    dl_members: int
    checks: list[CheckResult] = field(default_factory=list)
    label_counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _dl_members_and_sample(F, side: str, sample: int, seed: int):
    """Lines x with x^perp (minus side) or x (plus side) in Y, plus a sample of the rest."""
    pts = projective_points(F, 4)
    codes = label_lines(F, pts)
    members = [tuple(int(a) for a in x) for x, c in zip(pts, codes) if c != 3]
    rest = [i for i, c in enumerate(codes) if c == 3]
    rng = random.Random(seed)
    picked = sorted(rng.sample(rest, min(sample, len(rest))))
    others = [tuple(int(a) for a in pts[i]) for i in picked]
    return members, others, len(pts)


def _bijection(
    side: str,
    vertex: VertexLattice,
    model: QuatModel,
    exhaustive: bool | None,
    sample: int,
    seed: int,
) -> BijectionReport:
    ctx = model.ctx
    F = fq_field(ctx.p, ctx.d)
    lat = vertex.lat
    if side == "L0":
        inner, outer, dim = lat.scaled(1), lat, 3
        gram = residue_gram(outer)
        classify, table = classify_point_minus, _DL0
    else:
        inner, outer, dim = lat, dual(lat), 1
        gram = residue_gram(outer, 1)
        classify, table = classify_point_plus, _DL2
    if gram != std_gram(F):
        raise ValueError("the residue form of this vertex is not the standard one")
    if not model.is_tau_stable(lat):
        raise ValueError("vertex lattice is not tau-stable")
    if exhaustive is None:
        exhaustive = ctx.d <= 2
    if exhaustive:
        subs = list(iter_subspaces(ctx.p, ctx.d, 4, dim))
        total = len(subs)
    else:
        members, others, total = _dl_members_and_sample(F, side, sample, seed)
        lines = members + others
        if side == "L0":
            subs = [fq_perp(FqSubspace.span(ctx.p, ctx.d, [x])) for x in lines]
        else:
            subs = [FqSubspace.span(ctx.p, ctx.d, [x]) for x in lines]
    dl_label = {U.key(): classify(U) for U in subs}
    dl_members = {k for k, v in dl_label.items() if v != StratumLabel.NotInY}
    points: dict = {}
    image_fail, label_fail, roundtrip_fail = [], [], []
    counts: dict = {}
    for U in subs:
        D = lattice_from_residue(inner, outer, U)
        if not is_quat_point(D, model):
            continue
        img = residue_image(D, outer)
        if img != U:
            roundtrip_fail.append(U.serialize())
        points.setdefault(img.key(), []).append(D)
        lab = bt_label(D, model)
        got = dl_label.get(img.key())
        counts[lab.kind] = counts.get(lab.kind, 0) + 1
        if got is None or got == StratumLabel.NotInY:
            image_fail.append({"point": D.serialize(), "residue": img.serialize()})
        elif table.get(lab.kind) != got:
            label_fail.append({"point": D.serialize(), "bt": lab.kind, "dl": got.value})
    collisions = [k for k, v in points.items() if len(v) > 1]
    missing = sorted(dl_members - set(points))
    rep = BijectionReport(side, ctx.d, exhaustive, sum(len(v) for v in points.values()), len(dl_members))
    n = len(subs)
    rep.checks = [
        no_failures(f"bijection-{side}/lands-in-Y", image_fail, n),
        no_failures(f"bijection-{side}/residue-roundtrip", roundtrip_fail, n),
        no_failures(f"bijection-{side}/injective", [list(map(list, k)) for k in collisions], n),
        no_failures(f"bijection-{side}/surjective", [list(map(list, k)) for k in missing], len(dl_members)),
        no_failures(f"bijection-{side}/stratum-match", label_fail, n),
    ]
    if not exhaustive:
        # the DL side is exhaustive through the vectorized classifier
        full_count = sum(1 for c in label_lines(F, projective_points(F, 4)) if c != 3)
        rep.checks.append(compare(f"bijection-{side}/member-count", full_count, rep.lattice_points))
    rep.label_counts = dict(sorted(counts.items()))
    rep.checks.append(CheckResult(f"bijection-{side}/scope", "pass", None, {"subspaces_tested": n, "of": total}))
    return rep


def bijection_report_L0(L0: VertexLattice, model: QuatModel, exhaustive: bool | None = None, sample: int = 2000, seed: int = 0) -> BijectionReport:
    if L0.vtype != 0:
        raise ValueError("expected a type-0 vertex")
    return _bijection("L0", L0, model, exhaustive, sample, seed)


def bijection_report_L2(L2: VertexLattice, model: QuatModel, exhaustive: bool | None = None, sample: int = 2000, seed: int = 0) -> BijectionReport:
    if L2.vtype != 2:
        raise ValueError("expected a type-2 vertex")
    return _bijection("L2", L2, model, exhaustive, sample, seed)


def base_vertices(model: QuatModel | ParamModel) -> tuple[VertexLattice, VertexLattice]:
    L0 = model.base
    L2 = apply_semilinear(similitude_h(model.space), dual(L0))
    return VertexLattice(L0, 0), VertexLattice(L2, 2)


# --- intersections ---------------------------------------------------------------------------


def _vertices_around(D: Lattice, model: QuatModel) -> tuple[list[Lattice], list[Lattice]]:
    """tau-stable type-0 vertices containing D and type-2 vertices inside D."""
    tD = model.apply_tau(D)
    if tD != D:
        # a tau-stable lattice containing D contains D + tau D, which has the
        # volume of a type-0 vertex; dually for the type-2 side
        S, I = lattice_sum(D, tD), lattice_intersect(D, tD)
        up = [S] if classify_vertex(S) == 0 and model.is_tau_stable(S) else []
        down = [I] if classify_vertex(I) == 2 and model.is_tau_stable(I) else []
        return up, down
    Dd = dual(D)
    up = [L for L in intermediate_lattices(D, Dd, 1) if classify_vertex(L) == 0 and model.is_tau_stable(L)]
    down = [
        L
        for L in intermediate_lattices(Dd.scaled(1), D, 1)
        if classify_vertex(L) == 2 and model.is_tau_stable(L)
    ]
    return up, down


def _in_window(L: Lattice, radius: int = 1) -> bool:
    base = Lattice.standard(L.space)
    return base.scaled(radius) <= L <= base.scaled(-radius)


def intersection_checks(model: QuatModel, census: list[Lattice]) -> list[CheckResult]:
    """Pairwise intersections of lattice strata met by the census.

    Type-0 strata are {D : D <= L0}, type-2 strata {D : L2 <= D}; a pair is
    examined when some census point lies in both strata.
    """
    key = {D: i for i, D in enumerate(census)}
    strata0: dict[Lattice, set[int]] = {}
    strata2: dict[Lattice, set[int]] = {}
    pairs02: set[tuple[Lattice, Lattice]] = set()
    for D in census:
        up, down = _vertices_around(D, model)
        for L in up:
            strata0.setdefault(L, set()).add(key[D])
        for L in down:
            strata2.setdefault(L, set()).add(key[D])
        pairs02.update((u, v) for u in up for v in down)

    def shared_pairs(strata: dict[Lattice, set[int]]) -> list[tuple[Lattice, Lattice]]:
        owners: dict[int, list[Lattice]] = {}
        for L, pts in strata.items():
            for i in pts:
                owners.setdefault(i, []).append(L)
        seen = set()
        for Ls in owners.values():
            for a in range(len(Ls)):
                for b in range(a + 1, len(Ls)):
                    seen.add(tuple(sorted((Ls[a], Ls[b]))))
        return sorted(seen)

    memo: dict[Lattice, bool] = {}

    def is_point(D: Lattice) -> bool:
        if D in key:
            return True
        if _in_window(D, model.radius):
            return False
        if D not in memo:
            memo[D] = is_quat_point(D, model)
        return memo[D]

    fails00, fails22, fails02, exact_fail = [], [], [], []
    p00 = shared_pairs(strata0)
    for u, v in p00:
        pts = [census[i] for i in strata0[u] & strata0[v]]
        meet = lattice_intersect(u, v)
        good = len(pts) == 1 and model.is_tau_stable(pts[0]) and pts[0] == meet and classify_vertex(meet) == 1
        if not good:
            fails00.append({"L0": u.serialize(), "L0'": v.serialize(), "shared": len(pts)})
        # the full strata, not only their census parts, meet in one point
        exact = _points_between(lattice_sum(u.scaled(1), v.scaled(1)), meet, model)
        if len(exact) != 1:
            exact_fail.append({"L0": u.serialize(), "L0'": v.serialize(), "points": len(exact)})
    p22 = shared_pairs(strata2)
    for u, v in p22:
        pts = [census[i] for i in strata2[u] & strata2[v]]
        join = lattice_sum(u, v)
        good = len(pts) == 1 and model.is_tau_stable(pts[0]) and pts[0] == join and classify_vertex(join) == 1
        if not good:
            fails22.append({"L2": u.serialize(), "L2'": v.serialize(), "shared": len(pts)})
    q = model.ctx.q
    for L0, L2 in sorted(pairs02):
        ok = L2 <= L0 and colength(L2, L0) == 2
        mids = intermediate_lattices(L2, L0, 1) if ok else []
        n_pts = sum(1 for D in mids if is_point(D))
        if not (ok and len(mids) == q + 1 and n_pts == q + 1):
            fails02.append({"L0": L0.serialize(), "L2": L2.serialize(), "line_points": n_pts})
    return [
        no_failures("intersections/type0-pairs", fails00, len(p00)),
        no_failures("intersections/type0-pairs-exact", exact_fail, len(p00)),
        no_failures("intersections/type2-pairs", fails22, len(p22)),
        no_failures("intersections/type02-lines", fails02, len(pairs02)),
        CheckResult(
            "intersections/scope",
            "pass",
            None,
            {
                "type0_vertices": len(strata0),
                "type2_vertices": len(strata2),
                "pairs00": len(p00),
                "pairs22": len(p22),
                "pairs02": len(pairs02),
            },
        ),
    ]


def _points_between(inner: Lattice, outer: Lattice, model: QuatModel) -> list[Lattice]:
    """Quaternionic points D with inner <= D <= outer and volume 1."""
    if not inner <= outer:
        return []
    k = inner.volume - 1
    if k < 0 or outer.volume > 1:
        return []
    if not outer.scaled(1) <= inner:
        raise ValueError("points_between needs p*outer <= inner")
    return [D for D in intermediate_lattices(inner, outer, k) if is_quat_point(D, model)]


def type1_strata_check(model: QuatModel, census: list[Lattice]) -> CheckResult:
    """Each tau-stable type-1 vertex in the census is the only point of its stratum."""
    fails = []
    n = 0
    for D in census:
        if not model.is_tau_stable(D):
            continue
        n += 1
        if classify_vertex(D) != 1:
            fails.append(D.serialize())
            continue
        # points containing L1 have volume <= 1 = vol(L1), so only L1 itself
        pts = _points_between(D, D, model)
        if pts != [D]:
            fails.append(D.serialize())
    return no_failures("intersections/type1-single-point", fails, n)


# --- paramodular -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamStratification:
    label: BTLabel
    a_number: int
    findings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings


def param_stratify(M: Lattice, model: ParamModel) -> ParamStratification:
    findings = []
    FM = apply_semilinear(model.Pi, M)
    VM = apply_semilinear(model.V, M)
    a = colength(lattice_sum(FM, VM), M)
    if a not in (1, 2):
        findings.append("a-number outside {1, 2}")
    tM = model.apply_tau(M)
    if tM == M:
        if FM != VM:
            findings.append("tau2-stable point is not superspecial")
        if classify_vertex(M) != 1:
            findings.append("tau2-stable point is not a type-1 vertex")
        return ParamStratification(BTLabel("P1", L1=M), a, tuple(findings))
    L0 = lattice_sum(M, tM)
    L2 = lattice_intersect(M, tM)
    if a == 1:
        F2M = lattice_sum(apply_semilinear(model.Pi, FM), M.scaled(1))
        V2M = lattice_sum(apply_semilinear(model.V, VM), M.scaled(1))
        meet = lattice_intersect(FM, VM)
        if not (F2M == meet == V2M):
            findings.append("F^2 M + pM, FM cap VM, V^2 M + pM differ")
    L0d, L2d = dual(L0), dual(L2)
    if not (M <= L0 <= L0d and classify_vertex(L0) == 0 and model.is_tau_stable(L0)):
        findings.append("M + tau2 M is not a tau2-stable type-0 vertex over M")
    if not (L2d.scaled(1) <= L2 <= M and classify_vertex(L2) == 2 and model.is_tau_stable(L2)):
        findings.append("M cap tau2 M is not a tau2-stable type-2 vertex under M")
    else:
        pair = TypePair02(VertexLattice(L0, 0), VertexLattice(L2, 2), False)
        if not pair_check(pair.L0, pair.L2, model.Pi):
            findings.append("Pi(L0) != L2")
    return ParamStratification(BTLabel("P02", L0=L0, L2=L2), a, tuple(findings))


def make_param_pair(L0: Lattice, model: ParamModel) -> TypePair02:
    L2 = apply_semilinear(model.Pi, L0)
    t = classify_vertex(L2)
    v2 = VertexLattice(L2, t if t is not None else -1)
    compat = t == 2 and pair_check(VertexLattice(L0, 0), VertexLattice(L2, 2), model.Pi)
    return TypePair02(VertexLattice(L0, 0), v2, compat)


def pair_stratum(pair: TypePair02, model: ParamModel) -> list[Lattice]:
    """Points M with L2 <= M <= L0, one per line of L0 / L2."""
    L0, L2 = pair.L0.lat, pair.L2.lat
    return [M for M in intermediate_lattices(L2, L0, 1) if is_param_point(M, model)]


def param_bijection_report(pair: TypePair02, model: ParamModel) -> list[CheckResult]:
    ctx = model.ctx
    q = ctx.q
    L0, L2 = pair.L0.lat, pair.L2.lat
    lines = intermediate_lattices(L2, L0, 1)
    bad, ss_fail = [], []
    points = []
    for M in lines:
        if not is_param_point(M, model):
            bad.append(M.serialize())
            continue
        points.append(M)
        U = residue_image(M, L0)
        # lines of L0/L2 defined over F_{p^2}
        rational = U.frobenius(2) == U
        if model.is_tau_stable(M) != rational:
            ss_fail.append(M.serialize())
    keys = {residue_image(M, L0).key() for M in points}
    n_ss = sum(1 for M in points if model.is_tau_stable(M))
    return [
        CheckResult("param-bijection/pair-valid", "pass" if pair.compat else "fail", True, pair.compat, None if pair.compat else {"L0": L0.serialize()}),
        no_failures("param-bijection/every-line-is-a-point", bad, len(lines)),
        compare("param-bijection/census-size", q + 1, len(points)),
        compare("param-bijection/injective", len(points), len(keys)),
        compare("param-bijection/superspecial-count", ctx.p**2 + 1 if ctx.d >= 2 else 2, n_ss),
        no_failures("param-bijection/superspecial-are-Fp2-lines", ss_fail, len(points)),
    ]


def _pairs_containing(M: Lattice, model: ParamModel) -> list[TypePair02]:
    """Compatible tau2-stable pairs (L0, Pi L0) with Pi L0 <= M <= L0."""
    out = []
    for L0 in intermediate_lattices(M, dual(M), 1):
        if classify_vertex(L0) != 0 or not model.is_tau_stable(L0):
            continue
        pair = make_param_pair(L0, model)
        if pair.compat and pair.L2.lat <= M:
            out.append(pair)
    return out


def param_pair_intersections(base: TypePair02, model: ParamModel) -> list[CheckResult]:
    """Every pair meeting the base stratum shares at most one point with it, superspecial."""
    base_pts = set(pair_stratum(base, model))
    fails = []
    others = {}
    for M in sorted(base_pts):
        for pair in _pairs_containing(M, model):
            if pair.L0.lat != base.L0.lat:
                others[pair.L0.lat] = pair
    for L0, pair in sorted(others.items()):
        common = base_pts & set(pair_stratum(pair, model))
        if len(common) > 1 or any(not model.is_tau_stable(M) for M in common):
            fails.append({"L0": L0.serialize(), "shared": len(common)})
    return [no_failures("param-intersections/pairs-share-one-superspecial", fails, len(others))]


def find_m_std(model: ParamModel) -> Lattice | None:
    """First tau2-stable paramodular point in the radius-1 census."""
    for M in enumerate_ball_points(model, 1):
        if model.is_tau_stable(M):
            return M
    return None
