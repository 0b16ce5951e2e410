"""The extended affine Weyl group of type C~2 acting on the rank-2 apartment.

Elements are affine maps x -> fin.x + trans with ``fin`` a signed permutation
matrix and ``trans`` in (1/2 Z)^2, stored doubled.  The base alcove is
{1/2 > x1 > x2 > 0} with vertices (0, 0), (1/2, 0), (1/2, 1/2) of types 0, 1, 2.
Affine root hyperplanes are alpha = k for alpha in {e1 - e2, e1 + e2, 2e1, 2e2}.

The length-zero element swapping the two special vertices is called ``rho``
here.  This is the adjoint realization (rho^2 = 1): Adm(mu) lives in a single
W_a-coset, so lengths, Bruhat order and supports factor through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

Mat2 = tuple[tuple[int, int], tuple[int, int]]

NODES = (0, 1, 2)
# positive roots as integer functionals on (x1, x2)
POSITIVE_ROOTS = ((1, -1), (1, 1), (2, 0), (0, 2))
# barycenter of the base alcove, times 6
_BARY6 = (2, 1)


def _matmul(a: Mat2, b: Mat2) -> Mat2:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2))  # type: ignore[return-value]


def _matvec(a: Mat2, v: Sequence[int]) -> tuple[int, int]:
    return (a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1])


def _det(a: Mat2) -> int:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


IDENTITY_MAT: Mat2 = ((1, 0), (0, 1))


@dataclass(frozen=True, order=True)
class AffineWeylElem:
    fin: Mat2
    trans: tuple[int, int]  # doubled coordinates

    def __post_init__(self) -> None:
        if self.trans[0] % 2 != self.trans[1] % 2:
            raise ValueError("translation must lie in Z^2 or (1/2, 1/2) + Z^2")

    def __mul__(self, other: AffineWeylElem) -> AffineWeylElem:
        """(self * other)(x) = self(other(x))."""
        t = _matvec(self.fin, other.trans)
        return AffineWeylElem(_matmul(self.fin, other.fin), (t[0] + self.trans[0], t[1] + self.trans[1]))

    def inverse(self) -> AffineWeylElem:
        # orthogonal matrices: inverse is the transpose
        inv = ((self.fin[0][0], self.fin[1][0]), (self.fin[0][1], self.fin[1][1]))
        t = _matvec(inv, self.trans)
        return AffineWeylElem(inv, (-t[0], -t[1]))

    def act6(self, x6: Sequence[int]) -> tuple[int, int]:
        """Action on a point given in coordinates scaled by 6."""
        y = _matvec(self.fin, x6)
        return (y[0] + 3 * self.trans[0], y[1] + 3 * self.trans[1])

    @property
    def omega(self) -> int:
        """Component in Omega = {1, rho}: parity of the doubled translation."""
        return self.trans[0] % 2

    def __repr__(self) -> str:
        return name(self)


IDENTITY = AffineWeylElem(IDENTITY_MAT, (0, 0))


def translation(x2: int, y2: int) -> AffineWeylElem:
    """Translation by (x2/2, y2/2)."""
    return AffineWeylElem(IDENTITY_MAT, (x2, y2))


@lru_cache(maxsize=None)
def simple_reflections() -> tuple[AffineWeylElem, AffineWeylElem, AffineWeylElem]:
    s0 = AffineWeylElem(((-1, 0), (0, 1)), (2, 0))
    s1 = AffineWeylElem(((0, 1), (1, 0)), (0, 0))
    s2 = AffineWeylElem(((1, 0), (0, -1)), (0, 0))
    return s0, s1, s2


@lru_cache(maxsize=None)
def rho_element() -> AffineWeylElem:
    """(x1, x2) -> (1/2 - x2, 1/2 - x1)."""
    return AffineWeylElem(((0, -1), (-1, 0)), (1, 1))


def finite_weyl_group() -> list[Mat2]:
    out = []
    for perm in ((0, 1), (1, 0)):
        for signs in product((1, -1), repeat=2):
            m = [[0, 0], [0, 0]]
            for i in range(2):
                m[i][perm[i]] = signs[i]
            out.append((tuple(m[0]), tuple(m[1])))
    return sorted(out)  # type: ignore[arg-type]


def length(w: AffineWeylElem) -> int:
    """Number of affine root hyperplanes separating the base alcove from its image."""
    b = _BARY6
    wb = w.act6(b)
    total = 0
    for a in POSITIVE_ROOTS:
        u = a[0] * b[0] + a[1] * b[1]
        v = a[0] * wb[0] + a[1] * wb[1]
        total += abs(v // 6 - u // 6)
    return total


def word_element(word: Iterable[int], omega: int = 0) -> AffineWeylElem:
    s = simple_reflections()
    w = IDENTITY
    for i in word:
        w = w * s[i]
    if omega:
        w = w * rho_element()
    return w


@lru_cache(maxsize=None)
def reduced_word(w: AffineWeylElem) -> tuple[tuple[int, ...], int]:
    """(word, eps) with w = s_{i1} ... s_{il} rho^eps, l = length(w).

    The walk crosses, at each step, the lowest-indexed wall of the current
    alcove that separates it from w's alcove.
    """
    eps = w.omega
    x = w * rho_element() if eps else w
    s = simple_reflections()
    word: list[int] = []
    ell = length(x)
    while ell:
        for i in NODES:
            y = s[i] * x
            if length(y) < ell:
                word.append(i)
                x, ell = y, ell - 1
                break
        else:
            raise AssertionError("no descent found for an element of positive length")
    return tuple(word), eps


def name(w: AffineWeylElem) -> str:
    word, eps = reduced_word(w)
    body = "".join(f"s{i}" for i in word)
    if eps:
        return f"{body}·rho" if body else "rho"
    return body or "1"


def support(w: AffineWeylElem) -> frozenset[int]:
    return frozenset(reduced_word(w)[0])


def conjugate_by_rho(w: AffineWeylElem) -> AffineWeylElem:
    r = rho_element()
    return r * w * r.inverse()


# --- Bruhat order --------------------------------------------------------------------


def _wa_part(w: AffineWeylElem) -> AffineWeylElem:
    return w * rho_element() if w.omega else w


def bruhat_leq(u: AffineWeylElem, w: AffineWeylElem) -> bool:
    """Bruhat order via the lifting property along the reduced word of w."""
    if u.omega != w.omega:
        return False
    return _leq_wa(_wa_part(u), _wa_part(w))


@lru_cache(maxsize=None)
def _leq_wa(u: AffineWeylElem, w: AffineWeylElem) -> bool:
    lu, lw = length(u), length(w)
    if lu > lw:
        return False
    if lw == 0:
        return u == w
    s = simple_reflections()[reduced_word(w)[0][0]]
    sw = s * w
    su = s * u
    if length(su) < lu:
        return _leq_wa(su, sw)
    return _leq_wa(u, sw)


def bruhat_leq_subwords(u: AffineWeylElem, w: AffineWeylElem) -> bool:
    """Independent check: u <= w iff u is a product of a subword of a reduced word of w."""
    if u.omega != w.omega:
        return False
    return _wa_part(u) in subword_products(_wa_part(w))


@lru_cache(maxsize=None)
def subword_products(w: AffineWeylElem) -> frozenset[AffineWeylElem]:
    word, _ = reduced_word(w)
    out = set()
    for mask in product((0, 1), repeat=len(word)):
        out.add(word_element([i for i, b in zip(word, mask) if b]))
    return frozenset(out)


def ball(max_length: int) -> list[AffineWeylElem]:
    """All elements (both Omega-components) of length <= max_length, sorted."""
    s = simple_reflections()
    seen = {IDENTITY, rho_element()}
    frontier = list(seen)
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for si in s:
                x = si * w
                if x not in seen and length(x) <= max_length:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return sorted(seen, key=lambda w: (length(w), w.omega, reduced_word(w)))


def is_reflection(t: AffineWeylElem) -> bool:
    return t.omega == 0 and _det(t.fin) == -1 and t * t == IDENTITY


def bruhat_closure(elems: Sequence[AffineWeylElem]) -> set[tuple[AffineWeylElem, AffineWeylElem]]:
    """Transitive closure (with equality) of u < u t (t a reflection, length up)."""
    rel = {(u, u) for u in elems}
    idx = set(elems)
    up: dict[AffineWeylElem, list[AffineWeylElem]] = {u: [] for u in elems}
    for u in elems:
        for w in elems:
            if u.omega == w.omega and length(u) < length(w) and is_reflection(u.inverse() * w):
                up[u].append(w)
    for u in elems:
        stack = [u]
        seen = {u}
        while stack:
            x = stack.pop()
            for y in up[x]:
                if y not in seen and y in idx:
                    seen.add(y)
                    stack.append(y)
        rel.update((u, y) for y in seen)
    return rel


# --- admissible set, cosets, EO --------------------------------------------------------


def mu_translations() -> list[AffineWeylElem]:
    """t_{x(lambda)} for x in W0 and lambda = (1/2, 1/2)."""
    out = {AffineWeylElem(IDENTITY_MAT, _matvec(x, (1, 1))) for x in finite_weyl_group()}
    return sorted(out)


def adm_set() -> list[AffineWeylElem]:
    """Union of the Bruhat intervals below the four translations (subword strategy)."""
    out: set[AffineWeylElem] = set()
    r = rho_element()
    for t in mu_translations():
        out.update(u * r for u in subword_products(_wa_part(t)))
    return sorted(out, key=lambda w: (length(w), reduced_word(w)))


def adm_set_bruteforce() -> list[AffineWeylElem]:
    """Second strategy: scan the length <= 3 ball of the rho-coset with bruhat_leq."""
    ts = mu_translations()
    cands = [w for w in ball(3) if w.omega == 1]
    out = [w for w in cands if any(bruhat_leq(w, t) for t in ts)]
    return sorted(out, key=lambda w: (length(w), reduced_word(w)))


def parabolic(K: Iterable[int]) -> list[AffineWeylElem]:
    """The finite group W_K generated by s_k, k in K."""
    K = sorted(set(K))
    if set(K) == set(NODES):
        raise ValueError("K must be a proper subset of the affine nodes")
    s = simple_reflections()
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for w in frontier:
            for k in K:
                x = s[k] * w
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
    return sorted(seen, key=lambda w: (length(w), reduced_word(w)))


def min_coset_reps(K: Iterable[int]):
    """Predicate for ^K W: length(s_k w) > length(w) for every k in K."""
    K = tuple(sorted(set(K)))
    s = simple_reflections()

    def pred(w: AffineWeylElem) -> bool:
        lw = length(w)
        return all(length(s[k] * w) > lw for k in K)

    return pred


def is_coset_minimal_bruteforce(w: AffineWeylElem, K: Iterable[int]) -> bool:
    coset = [x * w for x in parabolic(K)]
    return length(w) == min(length(y) for y in coset)


def eo_set(K: Iterable[int] = (0, 2)) -> list[AffineWeylElem]:
    """W_K Adm(mu) W_K intersected with ^K W, sorted by length then word."""
    WK = parabolic(K)
    pred = min_coset_reps(K)
    out = {x * w * y for w in adm_set() for x in WK for y in WK}
    return sorted((w for w in out if pred(w)), key=lambda w: (length(w), reduced_word(w)))


def adm_k(K: Iterable[int] = (0, 2)) -> list[AffineWeylElem]:
    """Minimal-length representatives of the double cosets W_K w W_K met by Adm(mu)."""
    WK = parabolic(K)
    reps = set()
    for w in adm_set():
        dc = [x * w * y for x in WK for y in WK]
        reps.add(min(dc, key=lambda v: (length(v), reduced_word(v))))
    return sorted(reps, key=lambda w: (length(w), reduced_word(w)))


# --- sigma-support, Coxeter elements, J-set, tables ----------------------------------------


@dataclass(frozen=True)
class DynkinAction:
    perm: tuple[int, int, int]
    case: str

    @classmethod
    def quaternionic(cls) -> DynkinAction:
        return cls((2, 1, 0), "quaternionic")

    @classmethod
    def paramodular(cls) -> DynkinAction:
        return cls((0, 1, 2), "paramodular")

    @classmethod
    def for_case(cls, case: str) -> DynkinAction:
        if case == "quaternionic":
            return cls.quaternionic()
        if case == "paramodular":
            return cls.paramodular()
        raise ValueError(f"unknown case {case!r}")

    def composite(self) -> tuple[int, int, int]:
        """rho-conjugation composed with sigma, as a permutation of the nodes."""
        rho_perm = (2, 1, 0)
        return tuple(rho_perm[self.perm[i]] for i in NODES)  # type: ignore[return-value]


def _orbit_closure(S: Iterable[int], perm: Sequence[int]) -> frozenset[int]:
    out = set(S)
    frontier = list(out)
    while frontier:
        i = frontier.pop()
        j = perm[i]
        if j not in out:
            out.add(j)
            frontier.append(j)
    return frozenset(out)


def _orbits(S: Iterable[int], perm: Sequence[int]) -> int:
    S = set(S)
    count = 0
    while S:
        i = S.pop()
        S -= _orbit_closure([i], perm)
        count += 1
    return count


def sigma_support(w: AffineWeylElem, act: DynkinAction) -> frozenset[int]:
    if w.omega != 1:
        raise ValueError("sigma_support expects an element of the rho-coset")
    return _orbit_closure(support(_wa_part(w)), act.composite())


def is_sigma_coxeter(w: AffineWeylElem, act: DynkinAction) -> bool:
    supp = sigma_support(w, act)
    if supp == frozenset(NODES):
        return False
    return length(w) == _orbits(supp, act.composite())


def _diagram_distance(i: int, j: int) -> int:
    # the C~2 diagram is the path 0 - 1 - 2
    return abs(i - j)


def j_set(K: Iterable[int], act: DynkinAction) -> list[frozenset[int]]:
    K = set(K)
    outside = [v for v in NODES if v not in K]
    if len(outside) != 1:
        raise ValueError("K must omit exactly one node")
    v0 = outside[0]
    comp = act.composite()
    out = []
    for bits in product((0, 1), repeat=3):
        S = frozenset(i for i, b in zip(NODES, bits) if b)
        if not S or _orbit_closure(S, comp) != S:
            continue
        if len({_diagram_distance(v0, v) for v in S}) == 1:
            out.append(S)
    return sorted(out, key=lambda S: (len(S), sorted(S)))


@dataclass(frozen=True)
class TableRow:
    sigma: frozenset[int]
    w: AffineWeylElem
    complement: frozenset[int]
    supp: frozenset[int]

    def serialize(self) -> list:
        return [sorted(self.sigma), name(self.w), sorted(self.complement), sorted(self.supp)]


def eo_table(case: str, K: Iterable[int] = (0, 2)) -> list[TableRow]:
    """Rows (Sigma, w_Sigma, S~ - Sigma, supp_sigma(w_Sigma)).

    w_Sigma is the sigma-Coxeter EO element whose sigma-support is the largest
    one contained in S~ - Sigma.
    """
    act = DynkinAction.for_case(case)
    cox = [w for w in eo_set(K) if is_sigma_coxeter(w, act)]
    rows = []
    for S in j_set(K, act):
        comp = frozenset(NODES) - S
        fits = [w for w in cox if sigma_support(w, act) <= comp]
        if not fits:
            raise LookupError(f"no EO sigma-Coxeter element fits Sigma = {sorted(S)}")
        best = max(len(sigma_support(w, act)) for w in fits)
        top = [w for w in fits if len(sigma_support(w, act)) == best]
        if len(top) != 1:
            raise LookupError(f"ambiguous EO element for Sigma = {sorted(S)}")
        w = top[0]
        rows.append(TableRow(S, w, comp, sigma_support(w, act)))
    return sorted(rows, key=lambda r: (length(r.w), sorted(r.sigma)))


GOLDEN_TABLES = {
    "quaternionic": [
        [[1], "rho", [0, 2], []],
        [[0, 2], "s1·rho", [1], [1]],
        [[0], "s1s2·rho", [1, 2], [1, 2]],
        [[2], "s1s0·rho", [0, 1], [0, 1]],
    ],
    "paramodular": [
        [[1], "rho", [0, 2], []],
        [[0, 2], "s1·rho", [1], [1]],
    ],
}
