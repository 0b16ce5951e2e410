"""Truncated unramified Witt rings W(F_{p^d}) / p^m with an exact Frobenius.

The ring is modelled as (Z/p^m)[x]/(f) where f is the Hensel lift of an
irreducible factor of x^(p^d - 1) - 1.  Because x is then a root of unity,
the Frobenius is simply x -> x^p at every precision.

Hot loops elsewhere in the package work on the raw coefficient tuples and
call the ``RingCtx`` methods directly; ``RingElem`` is the public value type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

SUPPORTED_DEGREES = (1, 2, 4)

Coeffs = tuple[int, ...]


class PrecisionError(ArithmeticError):
    """Raised when an operation would exhaust the fixed p-adic precision."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


# --- polynomials over Z/N, coefficient lists low degree first -------------


def _trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: list[int], mod: int) -> list[int]:
    """Remainder of a modulo the monic polynomial f."""
    a = [c % mod for c in a]
    df = len(f) - 1
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k]
        if c:
            for i in range(df + 1):
                a[k - df + i] = (a[k - df + i] - c * f[i]) % mod
    return _trim(a[:df] if len(a) > df else a) or [0]


def _poly_mul(a: list[int], b: list[int], mod: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % mod
    return out


def _poly_powmod(base: list[int], e: int, f: list[int], mod: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, f, mod)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, mod), f, mod)
        base = _poly_mod(_poly_mul(base, base, mod), f, mod)
        e >>= 1
    return result


def _poly_gcd_is_one(a: list[int], b: list[int], p: int) -> bool:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b != [0]:
        inv = pow(b[-1], -1, p)
        monic = [(c * inv) % p for c in b]
        a, b = b, _poly_mod(a, monic, p)
    return len(a) == 1 and a[0] != 0


def _irreducible_mod_p(f: list[int], p: int) -> bool:
    """Rabin-style test for a monic polynomial of degree 1, 2 or 4 over F_p."""
    d = len(f) - 1
    x = [0, 1]
    if _poly_powmod(x, p**d, f, p) != _poly_mod(x, f, p):
        return False
    for k in {d // r for r in (2, 3) if d % r == 0}:
        h = _poly_powmod(x, p**k, f, p)
        h = h + [0] * (2 - len(h))
        h[1] = (h[1] - 1) % p
        if not _poly_gcd_is_one(f, h, p):
            return False
    return True


def _least_factor(p: int, d: int) -> list[int]:
    """Lexicographically least monic irreducible degree-d factor of x^(p^d-1) - 1 mod p."""
    if d == 1:
        # every x - a with a != 0 qualifies; the root 1 is taken as the canonical one
        return [p - 1, 1]
    for low in product(range(p), repeat=d):
        f = list(low) + [1]
        if f[0] != 0 and _irreducible_mod_p(f, p):
            return f
    raise ValueError(f"no irreducible polynomial of degree {d} mod {p}")


def _teichmuller_polynomial(p: int, d: int, m: int) -> tuple[int, ...]:
    """Hensel lift of the chosen factor to (Z/p^m)[x].

    Inside R = (Z/p^m)[x]/(g) for any lift g of the residue factor, the element
    T = x^(q^(m-1)) is the Teichmuller lift of x; its minimal polynomial over
    Z/p^m is the wanted f.
    """
    g = _least_factor(p, d)
    mod = p**m
    q = p**d
    t = _poly_powmod([0, 1], q ** (m - 1), g, mod)
    powers = [[1]]
    for _ in range(d):
        powers.append(_poly_mod(_poly_mul(powers[-1], t, mod), g, mod))
    # solve T^d = sum c_i T^i ; the system is unimodular since T = x mod p
    rows = [[(powers[i] + [0] * d)[r] for i in range(d)] for r in range(d)]
    rhs = [(powers[d] + [0] * d)[r] for r in range(d)]
    coeffs = _solve_unimodular(rows, rhs, p, mod)
    return tuple((-c) % mod for c in coeffs) + (1,)


def _solve_unimodular(a: list[list[int]], b: list[int], p: int, mod: int) -> list[int]:
    n = len(a)
    a = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] % p)
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, mod)
        a[col] = [(v * inv) % mod for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [(x - c * y) % mod for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


@dataclass(frozen=True)
class RingCtx:
    """Context for W(F_{p^d}) / p^m.  Immutable and shareable."""

    p: int
    d: int
    m: int
    f: tuple[int, ...] = field(compare=False)

    @cached_property
    def modulus(self) -> int:
        return self.p**self.m

    @cached_property
    def q(self) -> int:
        return self.p**self.d

    @cached_property
    def _reduction(self) -> tuple[Coeffs, ...]:
        # x^(d+k) mod f for k = 0 .. d-2
        d, mod = self.d, self.modulus
        out = []
        cur = [(-c) % mod for c in self.f[:d]]
        for _ in range(max(d - 1, 0)):
            out.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(cur[i] - top * self.f[i]) % mod for i in range(d)]
        return tuple(out)

    @cached_property
    def _frob_images(self) -> tuple[Coeffs, ...]:
        # sigma(x^k) = x^(pk) mod f
        d, mod = self.d, self.modulus
        fl = list(self.f)
        return tuple(
            tuple((_poly_powmod([0, 1], self.p * k, fl, mod) + [0] * d)[:d]) for k in range(d)
        )

    # -- raw coefficient-tuple arithmetic --------------------------------
    @cached_property
    def zero(self) -> Coeffs:
        return (0,) * self.d

    @cached_property
    def one(self) -> Coeffs:
        return (1,) + (0,) * (self.d - 1)

    def const(self, n: int) -> Coeffs:
        return (n % self.modulus,) + (0,) * (self.d - 1)

    def add(self, a: Coeffs, b: Coeffs) -> Coeffs:
        mod = self.modulus
        return tuple((x + y) % mod for x, y in zip(a, b))

    def sub(self, a: Coeffs, b: Coeffs) -> Coeffs:
        mod = self.modulus
        return tuple((x - y) % mod for x, y in zip(a, b))

    def neg(self, a: Coeffs) -> Coeffs:
        mod = self.modulus
        return tuple((-x) % mod for x in a)

    def scale(self, a: Coeffs, n: int) -> Coeffs:
        mod = self.modulus
        return tuple((x * n) % mod for x in a)

    def mul(self, a: Coeffs, b: Coeffs) -> Coeffs:
        d, mod = self.d, self.modulus
        if d == 1:
            return ((a[0] * b[0]) % mod,)
        if d == 2:
            a0, a1 = a
            b0, b1 = b
            top = a1 * b1
            r0, r1 = self._reduction[0]
            return ((a0 * b0 + top * r0) % mod, (a0 * b1 + a1 * b0 + top * r1) % mod)
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        res = prod[:d]
        for k, red in enumerate(self._reduction):
            c = prod[d + k]
            if c:
                for i in range(d):
                    res[i] += c * red[i]
        return tuple(x % mod for x in res)

    def is_zero(self, a: Coeffs) -> bool:
        return not any(a)

    def val(self, a: Coeffs) -> int:
        """p-adic valuation, with m standing for zero."""
        p, m = self.p, self.m
        best = m
        for c in a:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                if v < best:
                    best = v
        return best

    def divp(self, a: Coeffs, k: int) -> Coeffs:
        """Exact division by p^k (caller guarantees val(a) >= k)."""
        pk = self.p**k
        return tuple(x // pk for x in a)

    def mulp(self, a: Coeffs, k: int) -> Coeffs:
        if k == 0:
            return a
        return self.scale(a, self.p**k)

    @cached_property
    def _inverses(self) -> dict[Coeffs, Coeffs]:
        return {}

    def inv(self, a: Coeffs) -> Coeffs:
        """Inverse of a unit."""
        cache = self._inverses
        hit = cache.get(a)
        if hit is not None:
            return hit
        if self.val(a) != 0:
            raise ZeroDivisionError("element is not a unit")
        if self.d == 1:
            y = (pow(a[0], -1, self.modulus),)
        else:
            y = self._inv_newton(a)
        if len(cache) < 1_000_000:
            cache[a] = y
        return y

    def _inv_newton(self, a: Coeffs) -> Coeffs:
        # a^(q-2) inverts a modulo p; Newton iteration lifts it
        y = self.pow(a, self.q - 2)
        two = self.const(2)
        for _ in range(self.m.bit_length() + 1):
            y = self.mul(y, self.sub(two, self.mul(a, y)))
        return y

    def pow(self, a: Coeffs, e: int) -> Coeffs:
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def frob(self, a: Coeffs, s: int = 1) -> Coeffs:
        """sigma^s applied to a; s is taken mod d."""
        d = self.d
        s %= d
        if s == 0:
            return a
        mod = self.modulus
        imgs = self._frob_images
        for _ in range(s):
            out = [0] * d
            for k, c in enumerate(a):
                if c:
                    img = imgs[k]
                    for i in range(d):
                        out[i] += c * img[i]
            a = tuple(x % mod for x in out)
        return a

    def reduce_mod_pk(self, a: Coeffs, k: int) -> tuple[Coeffs, Coeffs]:
        """Split a = r + p^k * t with every coefficient of r in [0, p^k)."""
        pk = self.p**k
        return tuple(x % pk for x in a), tuple(x // pk for x in a)

    # -- residue field helpers -------------------------------------------
    def residue_index(self, a: Coeffs) -> int:
        """Encode a mod p as an integer in [0, q) (base-p digits, low degree first)."""
        p = self.p
        out = 0
        for c in reversed(a):
            out = out * p + c % p
        return out

    def from_residue_index(self, idx: int) -> Coeffs:
        p = self.p
        digits = []
        for _ in range(self.d):
            digits.append(idx % p)
            idx //= p
        return tuple(digits)

    def elem(self, coeffs: Coeffs | int) -> RingElem:
        if isinstance(coeffs, int):
            return RingElem(self, self.const(coeffs))
        if len(coeffs) != self.d:
            raise ValueError("coefficient vector has the wrong length")
        mod = self.modulus
        return RingElem(self, tuple(c % mod for c in coeffs))

    def gen(self) -> RingElem:
        if self.d == 1:
            return RingElem(self, self.const(1))
        return RingElem(self, (0, 1) + (0,) * (self.d - 2))

    def with_precision(self, m: int) -> RingCtx:
        return make_ring(self.p, self.d, m)


@dataclass(frozen=True)
class RingElem:
    """An element of W(F_{p^d}) / p^m in the power basis of x."""

    ctx: RingCtx
    coeffs: Coeffs

    def _coerce(self, other: RingElem | int) -> Coeffs:
        if isinstance(other, int):
            return self.ctx.const(other)
        if other.ctx != self.ctx:
            raise ValueError("elements live in different rings")
        return other.coeffs

    def __add__(self, other: RingElem | int) -> RingElem:
        return RingElem(self.ctx, self.ctx.add(self.coeffs, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other: RingElem | int) -> RingElem:
        return RingElem(self.ctx, self.ctx.sub(self.coeffs, self._coerce(other)))

    def __rsub__(self, other: RingElem | int) -> RingElem:
        return RingElem(self.ctx, self.ctx.sub(self._coerce(other), self.coeffs))

    def __neg__(self) -> RingElem:
        return RingElem(self.ctx, self.ctx.neg(self.coeffs))

    def __mul__(self, other: RingElem | int) -> RingElem:
        return RingElem(self.ctx, self.ctx.mul(self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> RingElem:
        if e < 0:
            return RingElem(self.ctx, self.ctx.pow(self.ctx.inv(self.coeffs), -e))
        return RingElem(self.ctx, self.ctx.pow(self.coeffs, e))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.coeffs == self.ctx.const(other)
        if isinstance(other, RingElem):
            return self.ctx == other.ctx and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.coeffs))

    def __repr__(self) -> str:
        return f"RingElem({list(self.coeffs)})"

    def inverse(self) -> RingElem:
        return RingElem(self.ctx, self.ctx.inv(self.coeffs))

    def residue(self) -> int:
        return self.ctx.residue_index(self.coeffs)


def make_ring(p: int, d: int, m: int) -> RingCtx:
    """Build the context for W(F_{p^d}) / p^m."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if d not in SUPPORTED_DEGREES:
        raise ValueError(f"unsupported degree {d}; expected one of {SUPPORTED_DEGREES}")
    if m < 1:
        raise ValueError("precision must be at least 1")
    return _make_ring_cached(p, d, m)


_RING_CACHE: dict[tuple[int, int, int], RingCtx] = {}


def _make_ring_cached(p: int, d: int, m: int) -> RingCtx:
    key = (p, d, m)
    if key not in _RING_CACHE:
        _RING_CACHE[key] = RingCtx(p, d, m, _teichmuller_polynomial(p, d, m))
    return _RING_CACHE[key]


def frobenius(e: RingElem, s: int = 1) -> RingElem:
    return RingElem(e.ctx, e.ctx.frob(e.coeffs, s))


def valuation(e: RingElem) -> int:
    return e.ctx.val(e.coeffs)


def teichmuller(ctx: RingCtx, a: int) -> RingElem:
    """Multiplicative lift of the residue-field element with index a.

    Residue elements are indexed by their base-p digit encoding (see
    ``RingCtx.residue_index``), so for d = 1 the index is the integer itself.
    """
    if not 0 < a < ctx.q:
        raise ValueError("the zero residue has no Teichmuller lift")
    lift = ctx.from_residue_index(a)
    return RingElem(ctx, ctx.pow(lift, ctx.q ** (ctx.m - 1)))
