"""Truncated Witt rings ``W_n(R)`` in Buium-Joyal coordinates.

``WittRing(base, p, n)`` is itself a ring in the sense of
``wittkit.substrate.rings`` so it can serve as the base of another Witt
ring; ``W_n(W_m(R))`` needs no special casing.  Elements are tuples of
``n + 1`` base-ring elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

from . import calculus, kernels
from .substrate.poly import SparsePoly
from .substrate.rings import ZZ, IntegerRing, NotInvertible, Ring, Zmod


class ShapeMismatch(ValueError):
    pass


class _Law:
    """A list of polynomials compiled for repeated evaluation over one base ring."""

    def __init__(self, bodies: Sequence[SparsePoly], ring: Ring):
        self.ring = ring
        self.bodies = list(bodies)
        self.compiled = []
        for body in bodies:
            terms = []
            for e, c in body.sorted_terms():
                mono = tuple((i, k) for i, k in enumerate(e) if k)
                terms.append((c, mono))
            self.compiled.append(terms)
        if isinstance(ring, Zmod):
            self.mode = "mod"
        elif isinstance(ring, IntegerRing):
            self.mode = "int"
        else:
            self.mode = "generic"

    def level(self, m: int, values: Sequence) -> object:
        terms = self.compiled[m]
        ring = self.ring
        if self.mode == "mod":
            mod = ring.m
            total = 0
            cache: Dict[Tuple[int, int], int] = {}
            for c, mono in terms:
                t = c
                for key in mono:
                    v = cache.get(key)
                    if v is None:
                        v = cache[key] = pow(values[key[0]], key[1], mod)
                    t = t * v
                total += t % mod
            return total % mod
        if self.mode == "int":
            total = 0
            for c, mono in terms:
                t = c
                for i, k in mono:
                    t *= values[i] ** k
                total += t
            return total
        cache = {}
        acc = ring.zero
        for c, mono in terms:
            t = ring.from_int(c)
            for key in mono:
                v = cache.get(key)
                if v is None:
                    v = cache[key] = ring.pow(values[key[0]], key[1])
                t = ring.mul(t, v)
            acc = ring.add(acc, t)
        return acc


@lru_cache(maxsize=None)
def _bodies(p: int, n: int, kind: str) -> Tuple[SparsePoly, ...]:
    return tuple(u.body for u in calculus.generate(p, n, kind))


@dataclass(frozen=True)
class InImage:
    preimage: tuple


@dataclass(frozen=True)
class NotInImage:
    witness: int  # first window index that disagrees


class WittRing(Ring):
    """``W_n(R)``: length ``n + 1`` vectors over ``base`` for the prime ``p``."""

    def __init__(self, base: Ring, p: int, n: int):
        if n < 0:
            raise ValueError("level must be non-negative")
        calculus.check_ceiling(p, n)
        self.base = base
        self.p = p
        self.n = n
        self.length = n + 1
        self.zero = (base.zero,) * (n + 1)
        self.one = (base.one,) + (base.zero,) * n
        self.finite = base.finite
        self._laws: Dict[str, _Law] = {}

    # -- plumbing --------------------------------------------------------
    def law(self, kind: str) -> _Law:
        hit = self._laws.get(kind)
        if hit is None:
            hit = self._laws[kind] = _Law(_bodies(self.p, self.n, kind), self.base)
        return hit

    def _check(self, a) -> None:
        if len(a) != self.length:
            raise ShapeMismatch(f"expected {self.length} components, got {len(a)}")

    def element(self, components: Sequence) -> tuple:
        comps = tuple(components)
        self._check(comps)
        if isinstance(self.base, Zmod):
            return tuple(c % self.base.m for c in comps)
        return comps

    def truncated(self, k: int) -> "WittRing":
        return WittRing(self.base, self.p, k)

    @property
    def size(self) -> int:
        return self.base.size ** self.length

    # -- ring interface ------------------------------------------------
    def add(self, a, b):
        self._check(a)
        self._check(b)
        law = self.law("Sum")
        out = []
        for m in range(self.length):
            out.append(law.level(m, a[: m + 1] + b[: m + 1]))
        return tuple(out)

    def mul(self, a, b):
        self._check(a)
        self._check(b)
        law = self.law("Product")
        return tuple(law.level(m, a[: m + 1] + b[: m + 1]) for m in range(self.length))

    def neg(self, a):
        self._check(a)
        law = self.law("Negation")
        return tuple(law.level(m, a[: m + 1]) for m in range(self.length))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def from_int(self, k: int):
        """``k * 1`` by doubling with the sum law."""
        k = int(k)
        if k < 0:
            return self.neg(self.from_int(-k))
        result = self.zero
        base = self.one
        while k:
            if k & 1:
                result = self.add(result, base)
            k >>= 1
            if k:
                base = self.add(base, base)
        return result

    def is_zero(self, a) -> bool:
        return all(self.base.is_zero(c) for c in a)

    def eq(self, a, b) -> bool:
        return all(self.base.eq(x, y) for x, y in zip(a, b))

    def is_unit(self, a) -> bool:
        return self.base.is_unit(a[0])

    def inv(self, a):
        """Newton iteration ``u <- u (2 - a u)`` from the inverse of ``x_0``."""
        if not self.is_unit(a):
            raise NotInvertible(f"{self.format(a)} is not a unit")
        u = (self.base.inv(a[0]),) + (self.base.zero,) * self.n
        two = self.from_int(2)
        for _ in range(4 * (self.n + 2) + 8):
            au = self.mul(a, u)
            if self.eq(au, self.one):
                return u
            u = self.mul(u, self.sub(two, au))
        raise NotInvertible(f"Newton iteration did not converge for {self.format(a)}")

    def elements(self):
        import itertools

        return (tuple(t) for t in itertools.product(list(self.base.elements()), repeat=self.length))

    def random_element(self, rng):
        return tuple(self.base.random_element(rng) for _ in range(self.length))

    def format(self, a) -> str:
        fmt = getattr(self.base, "format", str)
        return "(" + ",".join(fmt(c) for c in a) + ")"

    def __repr__(self):
        return f"WittRing({self.base!r}, p={self.p}, n={self.n})"

    def __eq__(self, other):
        return isinstance(other, WittRing) and (other.base, other.p, other.n) == (self.base, self.p, self.n)

    def __hash__(self):
        return hash(("W", self.base, self.p, self.n))

    # -- structure maps --------------------------------------------------
    def truncate(self, a, k: int | None = None):
        """Drop the last component (or keep the first ``k + 1``)."""
        self._check(a)
        if k is None:
            if self.n == 0:
                raise ShapeMismatch("cannot truncate W_0")
            k = self.n - 1
        if not 0 <= k <= self.n:
            raise ShapeMismatch(f"cannot truncate W_{self.n} to W_{k}")
        return tuple(a[: k + 1])

    def delta_shift(self, a):
        """The degree-shifting ``delta: W_n -> W_{n-1}`` dropping the first component."""
        self._check(a)
        if self.n == 0:
            raise ShapeMismatch("delta is not defined on W_0")
        return tuple(a[1:])

    def frobenius(self, a):
        """``tau(a)^p + p delta(a)`` in ``W_{n-1}``."""
        self._check(a)
        if self.n == 0:
            raise ShapeMismatch("Frobenius is not defined on W_0")
        low = self.truncated(self.n - 1)
        t = low.pow(self.truncate(a), self.p)
        return low.add(t, low.mul(low.from_int(self.p), self.delta_shift(a)))

    def ghost_map(self, a) -> tuple:
        self._check(a)
        ghosts = _bodies(self.p, self.n, "Ghost")
        law = _Law(ghosts, self.base)
        return tuple(law.level(m, a[: m + 1]) for m in range(self.length))

    def to_witt_coords(self, a) -> tuple:
        self._check(a)
        law = self.law("WittFromBJ")
        return tuple(law.level(m, a[: m + 1]) for m in range(self.length))

    def from_witt_coords(self, c) -> tuple:
        self._check(c)
        law = self.law("BJfromWitt")
        return tuple(law.level(m, tuple(c[: m + 1])) for m in range(self.length))

    def verschiebung(self, a) -> tuple:
        """``V: W_n -> W_{n+1}``: prepend 0 in classical coordinates."""
        self._check(a)
        up = WittRing(self.base, self.p, self.n + 1)
        c = self.to_witt_coords(a)
        return up.from_witt_coords((self.base.zero,) + c)

    def coplethysm(self, a, m: int, k: int) -> tuple:
        """``W_{m+k}(R) -> W_k(W_m(R))``: the sliding windows of length ``m + 1``."""
        self._check(a)
        if m < 0 or k < 0 or m + k != self.n:
            raise ShapeMismatch(f"split ({m},{k}) does not match level {self.n}")
        return tuple(tuple(a[i : i + m + 1]) for i in range(k + 1))

    def coplethysm_target(self, m: int, k: int) -> "WittRing":
        return WittRing(WittRing(self.base, self.p, m), self.p, k)

    def equalizer_check(self, z, m: int, k: int):
        """Is ``z`` in ``W_k(W_m(R))`` a window vector?  Returns the verdict."""
        if len(z) != k + 1 or any(len(w) != m + 1 for w in z):
            raise ShapeMismatch(f"expected {k + 1} windows of length {m + 1}")
        pre = tuple(z[0]) + tuple(w[m] for w in z[1:])
        eq = self.base.eq
        for i, w in enumerate(z):
            if not all(eq(w[j], pre[i + j]) for j in range(m + 1)):
                return NotInImage(i)
        return InImage(pre)

    def p_power_zero_degree(self, bound: int = 256) -> int | None:
        return p_nilpotency_degree(self.base, self.p, self.n, bound)

    # -- batch arithmetic over Z/m ----------------------------------------
    def batch(self, kind: str, xs: Sequence[tuple], ys: Sequence[tuple] | None = None) -> List[tuple]:
        """Evaluate a law on many points at once (base ring ``Zmod`` only)."""
        if not isinstance(self.base, Zmod):
            raise TypeError("batch evaluation needs a Zmod base ring")
        bodies = _bodies(self.p, self.n, kind)
        npts = len(xs)
        if npts == 0:
            return []
        levels = []
        for m, body in enumerate(bodies):
            cols = [[x[i] for x in xs] for i in range(m + 1)]
            if ys is not None:
                cols += [[y[i] for y in ys] for i in range(m + 1)]
            levels.append(kernels.eval_batch(body.terms, body.nvars, cols, self.base.m))
        return [tuple(int(level[i]) for level in levels) for i in range(npts)]


def witt_arith(ring: WittRing, op: str, a, b=None):
    if op == "add":
        return ring.add(a, b)
    if op == "mul":
        return ring.mul(a, b)
    if op == "neg":
        return ring.neg(a)
    raise ValueError(f"unknown operation {op!r}")


def ghost_of_nested(outer: WittRing, z) -> tuple:
    """Ghost of ``z`` in ``W_k(W_m(R))`` followed by the ghost of each ``W_m`` entry."""
    inner = outer.base
    if not isinstance(inner, WittRing):
        raise TypeError("expected a Witt ring over a Witt ring")
    # Z_j evaluated with W_m(R) arithmetic, then the W_m ghost of the result
    first = outer.ghost_map(z)
    return tuple(inner.ghost_map(g) for g in first)


def ghost_retraction(nested: Sequence[Sequence]) -> tuple:
    """``<<a_0,b_0>,...,<a_n,b_n>> -> <a_0,...,a_n,b_n>``."""
    nested = list(nested)
    if not nested or any(len(g) != 2 for g in nested):
        raise ShapeMismatch("expected ghost pairs")
    return tuple(g[0] for g in nested) + (nested[-1][1],)


def p_nilpotency_degree(base: Ring, p: int, n: int, bound: int = 256) -> int | None:
    """Least ``e`` with ``p^e = 0`` in ``W_n(base)``; ``None`` if none up to ``bound``."""
    ring = WittRing(base, p, n)
    pe = ring.from_int(p)
    acc = pe
    for e in range(1, bound + 1):
        if ring.is_zero(acc):
            return e
        acc = ring.mul(acc, pe)
    return None


def integer_isomorphism(p: int, n: int) -> Dict[int, tuple]:
    """The map ``Z/p^(n+1) -> W_n(F_p)``, ``k -> k * 1``, built by repeated addition."""
    ring = WittRing(Zmod(p), p, n)
    table = {}
    acc = ring.zero
    for k in range(p ** (n + 1)):
        table[k] = acc
        acc = ring.add(acc, ring.one)
    return table


def fermat_embedding(k: int, p: int, n: int) -> tuple:
    """``(k, delta k, ..., delta^n k)`` over ``ZZ`` with ``delta(k) = (k - k^p) / p``."""
    out = [k]
    for _ in range(n):
        k = (k - k ** p) // p
        out.append(k)
    return tuple(out)


def parse_vector(text: str, ring: Ring):
    """Parse ``(1,0)`` or nested ``((1,0),(0,1))`` into ring elements."""
    import ast

    try:
        value = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError):
        raise ValueError(f"cannot parse vector {text!r}") from None

    def build(v, r):
        if isinstance(r, WittRing):
            if not isinstance(v, tuple):
                v = (v,) if r.n == 0 else None
            if v is None or len(v) != r.length:
                raise ShapeMismatch(f"expected {r.length} components in {text!r}")
            return tuple(build(c, r.base) for c in v)
        if isinstance(v, int):
            return r.from_int(v)
        if isinstance(v, tuple) and hasattr(r, "d"):
            if len(v) != r.d:
                raise ValueError(f"expected {r.d} coefficients in {text!r}")
            return tuple(c % r.q for c in v)
        raise ValueError(f"cannot read {v!r} as an element of {r!r}")

    return build(value, ring)
