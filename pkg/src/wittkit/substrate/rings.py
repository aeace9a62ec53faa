"""Coefficient rings: the integers, residue rings, Galois rings and products.

Every ring exposes the same small vocabulary (``zero``, ``one``, ``add``,
``sub``, ``neg``, ``mul``, ``pow``, ``from_int``, ``is_zero``) and finite
rings also ``elements()`` and ``size``.  Elements are plain immutable Python
values: ints for ``ZZ`` and ``Zmod``, coefficient tuples for ``GaloisRing``,
tuples of component elements for ``ProductRing``.  Witt rings implement the
same vocabulary, which is what lets ``W_n(W_m(R))`` exist without special
cases.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, Iterator, Sequence, Tuple


class NotInvertible(ArithmeticError):
    pass


def factor_prime_power(m: int) -> Tuple[int, int] | None:
    """Return ``(p, k)`` with ``m == p**k``, or ``None``."""
    if m < 2:
        return None
    p = 2
    while p * p <= m and m % p:
        p += 1
    if m % p:
        p = m
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return (p, k) if m == 1 else None


class Ring:
    """Shared helpers; subclasses supply the primitive operations."""

    zero: Any
    one: Any
    finite = True

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def pow(self, a, e: int):
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return a == self.zero

    def eq(self, a, b) -> bool:
        return a == b

    def sum(self, items):
        acc = self.zero
        for x in items:
            acc = self.add(acc, x)
        return acc

    def inv(self, a):  # pragma: no cover - overridden where meaningful
        raise NotInvertible(f"{a!r} has no inverse in {self}")

    def elements(self) -> Iterator[Any]:
        raise TypeError(f"{self} is not finite")

    def random_element(self, rng):
        raise TypeError(f"{self} cannot sample random elements")


class IntegerRing(Ring):
    zero = 0
    one = 1
    finite = False

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def pow(self, a, e):
        return a ** e

    def from_int(self, n):
        return int(n)

    def inv(self, a):
        if a in (1, -1):
            return a
        raise NotInvertible(f"{a} is not a unit in Z")

    def is_unit(self, a):
        return a in (1, -1)

    def random_element(self, rng, bound: int = 50):
        return rng.randint(-bound, bound)

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "ZZ"

    def __eq__(self, other):
        return isinstance(other, IntegerRing)

    def __hash__(self):
        return hash("ZZ")


ZZ = IntegerRing()


class Zmod(Ring):
    """``Z/mZ`` with representatives normalised to ``[0, m)``."""

    def __init__(self, m: int):
        if m < 2:
            raise ValueError("modulus must be at least 2")
        self.m = m
        self.zero = 0
        self.one = 1
        pk = factor_prime_power(m)
        self.p, self.k = pk if pk else (None, None)

    @property
    def size(self) -> int:
        return self.m

    @property
    def characteristic(self) -> int:
        return self.m

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def neg(self, a):
        return -a % self.m

    def mul(self, a, b):
        return a * b % self.m

    def pow(self, a, e):
        if e < 0:
            return pow(self.inv(a), -e, self.m)
        return pow(a, e, self.m)

    def from_int(self, n):
        return int(n) % self.m

    def inv(self, a):
        try:
            return pow(a, -1, self.m)
        except ValueError:
            raise NotInvertible(f"{a} is not a unit mod {self.m}") from None

    def is_unit(self, a):
        from math import gcd

        return gcd(a, self.m) == 1

    def lift(self, a) -> int:
        return a

    def elements(self):
        return iter(range(self.m))

    def random_element(self, rng):
        return rng.randrange(self.m)

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return f"Zmod({self.m})"

    def __eq__(self, other):
        return isinstance(other, Zmod) and other.m == self.m

    def __hash__(self):
        return hash(("Zmod", self.m))


def GF(p: int) -> Zmod:
    if factor_prime_power(p) != (p, 1):
        raise ValueError(f"{p} is not prime")
    return Zmod(p)


@lru_cache(maxsize=None)
def _irreducible_table() -> Dict[Tuple[int, int], Tuple[int, ...]]:
    text = resources.files("wittkit.data").joinpath("irreducibles.txt").read_text()
    table = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        p, d, *coeffs = (int(t) for t in line.split())
        table[(p, d)] = tuple(coeffs)
    return table


def tabulated_modulus(p: int, d: int) -> Tuple[int, ...]:
    """The shipped irreducible of degree ``d`` over F_p (constant term first, monic)."""
    try:
        return _irreducible_table()[(p, d)]
    except KeyError:
        raise ValueError(f"no tabulated irreducible for p={p}, d={d}") from None


class GaloisRing(Ring):
    """``GR(p^k, d) = (Z/p^k)[x]/(f)`` with ``f`` monic and irreducible mod p.

    Elements are tuples of ``d`` residues, constant coefficient first.
    ``modulus`` is given constant-first including the leading 1; when omitted
    the tabulated irreducible for ``(p, d)`` is used.
    """

    def __init__(self, p: int, k: int, modulus: Sequence[int] | None = None, degree: int | None = None):
        if factor_prime_power(p) != (p, 1):
            raise ValueError(f"{p} is not prime")
        if k < 1:
            raise ValueError("k must be positive")
        if modulus is None:
            if degree is None:
                raise ValueError("give a modulus or a degree")
            modulus = tabulated_modulus(p, degree)
        modulus = tuple(int(c) for c in modulus)
        if modulus[-1] % p != 1 or len(modulus) < 2:
            raise ValueError("modulus must be monic of degree >= 1")
        self.p = p
        self.k = k
        self.q = p ** k
        self.d = len(modulus) - 1
        self.modulus = tuple(c % self.q for c in modulus[:-1]) + (1,)
        if not is_irreducible_mod_p(self.modulus, p):
            raise ValueError(f"modulus {modulus} is not irreducible mod {p}")
        self.zero = (0,) * self.d
        self.one = (1,) + (0,) * (self.d - 1)
        self._frob_gen = None

    @property
    def size(self) -> int:
        return self.q ** self.d

    @property
    def residue_size(self) -> int:
        return self.p ** self.d

    def add(self, a, b):
        q = self.q
        return tuple((x + y) % q for x, y in zip(a, b))

    def sub(self, a, b):
        q = self.q
        return tuple((x - y) % q for x, y in zip(a, b))

    def neg(self, a):
        q = self.q
        return tuple(-x % q for x in a)

    def mul(self, a, b):
        d, q, f = self.d, self.q, self.modulus
        prod = [0] * (2 * d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for top in range(2 * d - 2, d - 1, -1):
            c = prod[top] % q
            if c:
                base = top - d
                for i in range(d):
                    prod[base + i] -= c * f[i]
        return tuple(c % q for c in prod[:d])

    def from_int(self, n):
        return (int(n) % self.q,) + (0,) * (self.d - 1)

    def gen(self):
        if self.d == 1:
            return ((-self.modulus[0]) % self.q,)
        return (0, 1) + (0,) * (self.d - 2)

    def scalar(self, a) -> int | None:
        """The integer residue if ``a`` lies in ``Z/p^k``, else ``None``."""
        return a[0] if all(c == 0 for c in a[1:]) else None

    def is_unit(self, a):
        return self.reduce(a, 1) != (0,) * self.d

    def reduce(self, a, k: int):
        """Image in ``GR(p^k, d)`` (same modulus reduced)."""
        q = self.p ** k
        return tuple(c % q for c in a)

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertible(f"{a} is not a unit in {self}")
        residue = GaloisRing(self.p, 1, self.modulus)
        x = residue.pow(residue.reduce(a, 1), residue.residue_size - 2)
        x = tuple(x)
        two = self.from_int(2)
        prec = 1
        while prec < self.k:
            x = self.mul(x, self.sub(two, self.mul(a, x)))
            prec *= 2
        return x

    def frobenius(self, a):
        """The Frobenius automorphism: fixes ``Z/p^k`` and sends the generator to
        the root of the modulus congruent to its p-th power."""
        if self._frob_gen is None:
            from .upoly import hensel_root

            start = self.pow(self.gen(), self.p)
            self._frob_gen = hensel_root(list(self.modulus), self, start)
        acc = self.zero
        power = self.one
        for c in a:
            acc = self.add(acc, self.mul(self.from_int(c), power))
            power = self.mul(power, self._frob_gen)
        return acc

    def elements(self):
        return (tuple(c) for c in itertools.product(range(self.q), repeat=self.d))

    def random_element(self, rng):
        return tuple(rng.randrange(self.q) for _ in range(self.d))

    def format(self, a) -> str:
        return "[" + ",".join(str(c) for c in a) + "]"

    def __repr__(self):
        return f"GaloisRing({self.p}, {self.k}, {list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, GaloisRing) and (other.p, other.k, other.modulus) == (
            self.p,
            self.k,
            self.modulus,
        )

    def __hash__(self):
        return hash(("GR", self.p, self.k, self.modulus))


class ProductRing(Ring):
    """``R^r`` with componentwise operations (the ghost target, among others)."""

    def __init__(self, base: Ring, r: int):
        self.base = base
        self.r = r
        self.zero = (base.zero,) * r
        self.one = (base.one,) * r
        self.finite = base.finite

    @property
    def size(self):
        return self.base.size ** self.r

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.base.sub(x, y) for x, y in zip(a, b))

    def neg(self, a):
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a, b):
        return tuple(self.base.mul(x, y) for x, y in zip(a, b))

    def from_int(self, n):
        return (self.base.from_int(n),) * self.r

    def is_unit(self, a):
        return all(self.base.is_unit(x) for x in a)

    def inv(self, a):
        return tuple(self.base.inv(x) for x in a)

    def elements(self):
        return (tuple(t) for t in itertools.product(list(self.base.elements()), repeat=self.r))

    def random_element(self, rng):
        return tuple(self.base.random_element(rng) for _ in range(self.r))

    def format(self, a) -> str:
        return "<" + ",".join(_fmt(self.base, x) for x in a) + ">"

    def __repr__(self):
        return f"ProductRing({self.base!r}, {self.r})"

    def __eq__(self, other):
        return isinstance(other, ProductRing) and (other.base, other.r) == (self.base, self.r)

    def __hash__(self):
        return hash(("Prod", self.base, self.r))


def _fmt(ring, x) -> str:
    fmt = getattr(ring, "format", None)
    return fmt(x) if fmt else str(x)


def finite_ring_enumerate(ring: Ring):
    """Every element of a finite ring exactly once, in a fixed order."""
    return list(ring.elements())


# -- polynomials over F_p as constant-first int lists (used for irreducibility) --

def _trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _polymod_p(a, f, p):
    a = [c % p for c in a]
    _trim(a)
    inv_lead = pow(f[-1], -1, p)
    df = len(f) - 1
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _polymul_p(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _polygcd_p(a, b, p):
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, _polymod_p(a, b, p)
    return a


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    """Rabin's test on a constant-first coefficient list."""
    f = _trim([c % p for c in f])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True

    def frob_power(e):
        # x^(p^e) mod f
        r = [0, 1]
        for _ in range(e):
            base, acc, k = r, [1], p
            while k:
                if k & 1:
                    acc = _polymod_p(_polymul_p(acc, base, p), f, p)
                base = _polymod_p(_polymul_p(base, base, p), f, p)
                k >>= 1
            r = acc
        return r

    xq = frob_power(n)
    diff = xq + [0] * max(0, 2 - len(xq))
    diff[1] = (diff[1] - 1) % p
    if _trim(diff):
        return False
    primes = [q for q in range(2, n + 1) if n % q == 0 and all(q % s for s in range(2, q))]
    for q in primes:
        h = frob_power(n // q)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        g = _polygcd_p(f, _trim(h), p)
        if len(g) > 1:
            return False
    return True
