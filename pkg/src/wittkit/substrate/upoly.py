"""Univariate polynomials as constant-first lists over a ring, plus roots.

Dense lists keep the canonical-lift code (division polynomials, kernel
polynomials, Hensel factorisation) simple.  ``find_roots`` is the
enumeration oracle; ``field_roots`` splits by random gcds for residue fields
too large to enumerate.
"""

from __future__ import annotations

import random
from typing import List, Sequence

from .poly import SparsePoly
from .rings import GaloisRing, NotInvertible, Ring, Zmod


class NonUnitDerivative(ArithmeticError):
    pass


def trim(ring: Ring, f: Sequence) -> list:
    f = list(f)
    while f and ring.is_zero(f[-1]):
        f.pop()
    return f


def as_dense(f, ring: Ring) -> list:
    """Accept a univariate SparsePoly or a coefficient list; return a list over ``ring``."""
    if isinstance(f, SparsePoly):
        if f.nvars != 1:
            raise ValueError("expected a univariate polynomial")
        out = [ring.zero] * (f.degree() + 1)
        for (e,), c in f.terms.items():
            out[e] = ring.from_int(c) if isinstance(c, int) else c
        return trim(ring, out)
    return trim(ring, [ring.from_int(c) if isinstance(c, int) else c for c in f])


def add(ring, f, g):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else ring.zero
        b = g[i] if i < len(g) else ring.zero
        out.append(ring.add(a, b))
    return trim(ring, out)


def sub(ring, f, g):
    return add(ring, f, [ring.neg(c) for c in g])


def scale(ring, f, c):
    return trim(ring, [ring.mul(c, a) for a in f])


def mul(ring, f, g):
    if not f or not g:
        return []
    out = [ring.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if ring.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = ring.add(out[i + j], ring.mul(a, b))
    return trim(ring, out)


def divmod_(ring, f, g):
    """Division by ``g`` whose leading coefficient is a unit."""
    g = trim(ring, g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    inv = ring.inv(g[-1])
    r = list(f)
    dg = len(g) - 1
    q = [ring.zero] * max(len(r) - dg, 0)
    r = trim(ring, r)
    while len(r) - 1 >= dg:
        c = ring.mul(r[-1], inv)
        shift = len(r) - 1 - dg
        q[shift] = c
        for i, b in enumerate(g):
            r[shift + i] = ring.sub(r[shift + i], ring.mul(c, b))
        r.pop()
        r = trim(ring, r)
    return trim(ring, q), r


def mod(ring, f, g):
    return divmod_(ring, f, g)[1]


def powmod(ring, f, e: int, g):
    result = [ring.one]
    base = mod(ring, f, g)
    while e:
        if e & 1:
            result = mod(ring, mul(ring, result, base), g)
        e >>= 1
        if e:
            base = mod(ring, mul(ring, base, base), g)
    return result


def gcd(ring, f, g):
    """Monic gcd over a field."""
    f, g = trim(ring, f), trim(ring, g)
    while g:
        f, g = g, mod(ring, f, g)
    if not f:
        return f
    return scale(ring, f, ring.inv(f[-1]))


def evaluate(ring, f, x):
    acc = ring.zero
    for c in reversed(f):
        acc = ring.add(ring.mul(acc, x), c)
    return acc


def derivative(ring, f):
    return trim(ring, [ring.mul(ring.from_int(i), c) for i, c in enumerate(f)][1:])


def compose(ring, f, g):
    acc: list = []
    for c in reversed(f):
        acc = add(ring, mul(ring, acc, g), [c])
    return acc


def find_roots(f, ring: Ring) -> set:
    """All roots of ``f`` in the finite field ``ring`` by full enumeration."""
    coeffs = as_dense(f, ring)
    if not coeffs:
        raise ValueError("zero polynomial")
    return {a for a in ring.elements() if ring.is_zero(evaluate(ring, coeffs, a))}


def _residue_unit(ring, a) -> bool:
    return ring.is_unit(a)


def hensel_root(f, ring: Ring, r0):
    """Lift a simple root mod p to a root in ``Z/p^k`` or ``GR(p^k, d)`` by Newton steps."""
    coeffs = as_dense(f, ring)
    if isinstance(r0, int) and not isinstance(ring, Zmod):
        r0 = ring.from_int(r0)
    if isinstance(ring, Zmod):
        r0 %= ring.m
    df = derivative(ring, coeffs)
    d0 = evaluate(ring, df, r0)
    if not _residue_unit(ring, d0):
        raise NonUnitDerivative(f"f'({ring.format(r0)}) = {ring.format(d0)} is not a unit")
    k = getattr(ring, "k", None) or 1
    r = r0
    prec = 1
    while True:
        val = evaluate(ring, coeffs, r)
        if ring.is_zero(val):
            return r
        if prec >= 2 * k:
            break
        r = ring.sub(r, ring.mul(val, ring.inv(evaluate(ring, df, r))))
        prec *= 2
    raise ArithmeticError("Newton iteration failed to converge; r0 is not a root mod p")


def field_roots(f, field: Ring, seed: int = 0) -> list:
    """Roots of ``f`` in a finite field of odd characteristic by equal-degree splitting.

    The field is ``Zmod(p)`` or ``GaloisRing(p, 1, ...)``.  Output is sorted by
    the element representation so it does not depend on the random splits.
    """
    coeffs = as_dense(f, field)
    if not coeffs:
        raise ValueError("zero polynomial")
    q = field.size
    if q % 2 == 0:
        return sorted(find_roots(coeffs, field))
    x = [field.zero, field.one]
    xq = powmod(field, x, q, coeffs)
    g = gcd(field, coeffs, sub(field, xq, x))
    rng = random.Random(seed)
    roots: List = []
    stack = [g]
    half = (q - 1) // 2
    while stack:
        h = stack.pop()
        deg = len(h) - 1
        if deg <= 0:
            continue
        if deg == 1:
            roots.append(field.neg(field.mul(h[0], field.inv(h[1]))))
            continue
        while True:
            shift = field.random_element(rng)
            t = powmod(field, [shift, field.one], half, h)
            d = gcd(field, h, sub(field, t, [field.one]))
            if 0 < len(d) - 1 < deg:
                break
        stack.append(d)
        stack.append(divmod_(field, h, d)[0])
    return sorted(roots)


def hensel_factor(ring: Ring, f, g0, h0, steps: int):
    """Lift ``f == g0*h0`` (mod p) with ``g0`` monic and coprime to ``h0`` mod p.

    Linear lifting over ``Z/p^k``: each pass fixes one more p-adic digit.
    Returns ``(g, h)`` with ``g`` monic, ``deg g == deg g0`` and ``f == g*h``.
    """
    p = ring.p
    field = Zmod(p)
    gbar = [c % p for c in g0]
    hbar = [c % p for c in h0]
    s, t = _bezout(field, gbar, hbar)
    g = [ring.from_int(c) for c in g0]
    h = [ring.from_int(c) for c in h0]
    for _ in range(steps):
        e = sub(ring, f, mul(ring, g, h))
        if not e:
            break
        # e == 0 mod p^j; solve the correction over F_p so degrees cannot creep up
        j = min(_int_valuation(c, p) for c in e if c)
        scale = p ** j
        ebar = trim(field, [(c // scale) % p for c in e])
        qt, dg = divmod_(field, mul(field, t, ebar), gbar)
        dh = add(field, mul(field, s, ebar), mul(field, qt, hbar))
        g = add(ring, g, [ring.from_int(c * scale) for c in dg])
        h = add(ring, h, [ring.from_int(c * scale) for c in dh])
    return g, h


def _int_valuation(c: int, p: int) -> int:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def _bezout(field, a, b):
    """``s, t`` with ``s*a + t*b == 1`` over a prime field."""
    r0, r1 = trim(field, a), trim(field, b)
    s0, s1 = [field.one], []
    t0, t1 = [], [field.one]
    while r1:
        qt, r = divmod_(field, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(field, s0, mul(field, qt, s1))
        t0, t1 = t1, sub(field, t0, mul(field, qt, t1))
    if len(r0) != 1:
        raise NotInvertible("factors are not coprime mod p")
    inv = field.inv(r0[0])
    return scale(field, s0, inv), scale(field, t0, inv)
