"""Backend selection for the hot loops.

The compiled extension ``wittkit._kernels`` is used when it imports and the
environment variable ``WITTKIT_PURE`` is unset; otherwise the pure-Python
twins in ``wittkit._pykernels`` run.  Both expose ``mul_mod`` and
``eval_mod`` with identical results, so everything above this module is
backend-agnostic.

Exact integer products go through ``mul_exact``: on the compiled backend the
product is computed modulo enough word-sized primes to cover the l1 bound
``|f|_1 * |g|_1`` and reconstructed by CRT; on the Python backend a plain
dictionary convolution is faster than that detour.
"""

from __future__ import annotations

import os
from array import array
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from . import _pykernels

try:
    if os.environ.get("WITTKIT_PURE"):
        raise ImportError("pure backend forced")
    from . import _kernels as _impl  # type: ignore[attr-defined]

    BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised in the fallback CI leg
    _impl = _pykernels
    BACKEND = "python"

Terms = Dict[Tuple[int, ...], int]

# Below this many coefficient products the Python convolution wins anyway.
_SMALL_PRODUCT = 4096


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11):  # deterministic below 2.1e12
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def word_primes(count: int) -> Tuple[int, ...]:
    """The ``count`` largest primes below 2**31, descending."""
    out: List[int] = []
    n = (1 << 31) - 1
    while len(out) < count:
        if _is_prime(n):
            out.append(n)
        n -= 2
    return tuple(out)


def pack_layout(maxdeg: Sequence[int]) -> Tuple[int, ...] | None:
    """Bit offsets for packing exponent vectors with the given maxima.

    Returns ``None`` when the packed key would not fit in 63 bits (the
    all-ones word marks empty hash slots).
    """
    offsets = []
    pos = 0
    for d in maxdeg:
        offsets.append(pos)
        pos += max(int(d).bit_length(), 1)
    if pos > 63:
        return None
    return tuple(offsets)


def _pack(exps: Iterable[Tuple[int, ...]], offsets: Tuple[int, ...]) -> array:
    out = array("Q")
    for e in exps:
        k = 0
        for x, off in zip(e, offsets):
            k |= x << off
        out.append(k)
    return out


def _unpack(key: int, offsets: Tuple[int, ...], nvars: int) -> Tuple[int, ...]:
    res = []
    for i in range(nvars):
        hi = offsets[i + 1] if i + 1 < nvars else 64
        res.append((key >> offsets[i]) & ((1 << (hi - offsets[i])) - 1))
    return tuple(res)


def _mul_python(a: Terms, b: Terms) -> Terms:
    acc: Dict[Tuple[int, ...], int] = {}
    get = acc.get
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            acc[e] = get(e, 0) + ca * cb
    return {e: c for e, c in acc.items() if c}


def mul_exact(a: Terms, b: Terms, nvars: int) -> Terms:
    """Exact product of two integer term dictionaries over ``nvars`` variables."""
    if not a or not b:
        return {}
    if BACKEND == "python" or len(a) * len(b) < _SMALL_PRODUCT:
        return _mul_python(a, b)
    maxdeg = [
        max(e[i] for e in a) + max(e[i] for e in b) for i in range(nvars)
    ]
    offsets = pack_layout(maxdeg)
    if offsets is None:
        return _mul_python(a, b)
    bound = 2 * sum(abs(c) for c in a.values()) * sum(abs(c) for c in b.values()) + 1
    primes = []
    modulus = 1
    for q in word_primes(64):
        if modulus > bound:
            break
        primes.append(q)
        modulus *= q
    if modulus <= bound:
        return _mul_python(a, b)
    exps_a, coef_a = zip(*a.items())
    exps_b, coef_b = zip(*b.items())
    ka = _pack(exps_a, offsets)
    kb = _pack(exps_b, offsets)
    residues: Dict[int, List[int]] = {}
    for idx, q in enumerate(primes):
        ca = array("Q", (c % q for c in coef_a))
        cb = array("Q", (c % q for c in coef_b))
        keys, vals = _impl.mul_mod(ka, ca, kb, cb, q)
        for k, v in zip(keys, vals):
            slot = residues.get(k)
            if slot is None:
                slot = residues[k] = [0] * len(primes)
            slot[idx] = v
    # Garner-free CRT with precomputed idempotents.
    basis = []
    for q in primes:
        rest = modulus // q
        basis.append(rest * pow(rest, -1, q))
    half = modulus // 2
    out: Terms = {}
    for k, rs in residues.items():
        x = sum(r * e for r, e in zip(rs, basis)) % modulus
        if x > half:
            x -= modulus
        if x:
            out[_unpack(k, offsets, nvars)] = x
    return out


def eval_batch(terms: Terms, nvars: int, columns: Sequence[Sequence[int]], m: int) -> array:
    """Evaluate an integer polynomial at many points modulo ``m``.

    ``columns[v]`` lists the value of variable ``v`` at every point.
    Falls back to Python big-int evaluation when ``m`` is too wide for the
    word-sized kernels.
    """
    npts = len(columns[0]) if columns else 1
    if m >= (1 << 31):
        return _eval_wide(terms, nvars, columns, npts, m)
    coefs = array("Q")
    exps = array("Q")
    for e, c in terms.items():
        coefs.append(c % m)
        exps.extend(e)
    cols = array("Q")
    for col in columns:
        cols.extend(x % m for x in col)
    if not columns:
        nvars = 0
    return _impl.eval_mod(coefs, exps, nvars, cols, npts, m)


def _eval_wide(terms, nvars, columns, npts, m):
    out = array("Q") if m < (1 << 64) else []
    for i in range(npts):
        total = 0
        for e, c in terms.items():
            for v, k in enumerate(e):
                if k:
                    c = c * pow(columns[v][i], k, m) % m
            total += c
        out.append(total % m)
    return out


def _prime_cover(bound: int) -> List[int]:
    """Word primes whose product exceeds ``bound``."""
    primes: List[int] = []
    modulus = 1
    k = 1
    while modulus <= bound:
        primes = list(word_primes(k))
        modulus = 1
        for q in primes:
            modulus *= q
        k += 1
    return primes


def compose_bound(terms: Terms, subs: Sequence[Terms]) -> int:
    """An upper bound for every coefficient of ``terms`` composed with ``subs``."""
    norms = [sum(abs(c) for c in s.values()) for s in subs]
    total = 0
    for e, c in terms.items():
        t = abs(c)
        for n, k in zip(norms, e):
            if k:
                t *= n ** k
        total += t
    return total


def _compose_mod(terms, subs_packed, q, nvars_src):
    """``terms`` composed with packed substitutes, coefficients mod ``q``."""
    reduced = [(array("Q", ks), array("Q", (c % q for c in cs))) for ks, cs in subs_packed]
    powers: Dict[Tuple[int, int], Tuple[array, array]] = {}

    def power(i, k):
        key = (i, k)
        hit = powers.get(key)
        if hit is not None:
            return hit
        if k == 1:
            res = reduced[i]
        else:
            half = power(i, k // 2)
            res = _impl.mul_mod(half[0], half[1], half[0], half[1], q)
            if k % 2:
                res = _impl.mul_mod(res[0], res[1], reduced[i][0], reduced[i][1], q)
        powers[key] = res
        return res

    table = _impl.ModTable(q, 1 << 16)
    one_k = array("Q", [0])
    for e, c in terms.items():
        c %= q
        if not c:
            continue
        factors = sorted((power(i, k) for i, k in enumerate(e) if k), key=lambda f: len(f[0]))
        if not factors:
            table.add_terms(one_k, array("Q", [c]))
            continue
        part = factors[0]
        for f in factors[1:-1]:
            part = _impl.mul_mod(part[0], part[1], f[0], f[1], q)
        if len(factors) == 1:
            table.add_terms(part[0], part[1], c)
        else:
            last = factors[-1]
            table.add_products(part[0], part[1], last[0], last[1], c)
    return table


def compose_equals(terms: Terms, subs: Sequence[Terms], nvars: int, expected: Terms) -> bool:
    """Exact test of ``terms(subs) == expected`` without forming the composite over Z.

    Both sides are reduced modulo word primes whose product exceeds the
    coefficient bound of their difference, so agreement mod every prime
    means equality over the integers.
    """
    subs = list(subs)
    degs = [0] * nvars
    sub_deg = [[max((e[v] for e in s), default=0) for v in range(nvars)] for s in subs]
    for e in terms:
        for v in range(nvars):
            d = sum(k * sd[v] for k, sd in zip(e, sub_deg))
            if d > degs[v]:
                degs[v] = d
    for e in expected:
        for v in range(nvars):
            degs[v] = max(degs[v], e[v])
    offsets = pack_layout(degs)
    if offsets is None:
        raise OverflowError("exponents do not fit a 64-bit packed key")
    bound = compose_bound(terms, subs) + sum(abs(c) for c in expected.values())
    subs_packed = []
    for s in subs:
        if s:
            ks, cs = zip(*s.items())
            subs_packed.append((_pack(ks, offsets), list(cs)))
        else:
            subs_packed.append((array("Q"), []))
    exp_keys = _pack(expected.keys(), offsets)
    exp_vals = list(expected.values())
    for q in _prime_cover(bound):
        table = _compose_mod(terms, subs_packed, q, len(subs))
        table.add_terms(exp_keys, array("Q", ((-c) % q for c in exp_vals)))
        keys, _ = table.items()
        if len(keys):
            return False
    return True
