"""Canonical lifts of ordinary elliptic curves over prime fields.

Curves are ``y^2 = x^3 + a x + b`` over ``Z/p^k`` or a Galois ring, ``p >= 5``.
The lift is computed as the fixed point of the quotient by the connected
(multiplicative) part of ``E[p]``: over ``F_p`` that quotient is the relative
Frobenius onto ``E^(p) = E``, and on Serre-Tate parameters it is ``q -> q^p``,
so each step fixes one more p-adic digit of ``j``.  The connected kernel has
non-integral x-coordinates, so it is never written down: its kernel
polynomial comes from a Hensel factorisation of the reversed p-division
polynomial and only its power sums, scaled to integrality, enter Velu's
formulas.

The etale side (``etale_kernel_poly``) builds the order-p subgroup lifting
``E[p]^et`` over an unramified extension.  That subgroup exists only when the
curve is already canonical modulo ``p^2``; it supplies the Verschiebung half
of the check ``v o f = [p]`` in ``verify_vp_factorization``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Sequence, Tuple

from .substrate import upoly
from .substrate.poly import SparsePoly
from .substrate.rings import GaloisRing, NotInvertible, Ring, Zmod, factor_prime_power


class SingularCurve(ArithmeticError):
    pass


class SpecialJ(ValueError):
    pass


class NotOrdinary(ValueError):
    pass


class BadReduction(ArithmeticError):
    pass


class NoEtaleLift(BadReduction):
    """The etale p-torsion does not lift over an unramified ring: the curve is not canonical mod p^2."""


class SingularImage(ArithmeticError):
    pass


class Unsupported(ValueError):
    pass


class Mismatch(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    def __init__(self, message: str, trace: Sequence[int]):
        super().__init__(f"{message}; j-trace: {list(trace)}")
        self.trace = list(trace)


SUPPORTED_PRIMES = (5, 7, 11, 13)


# -- curves -----------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticCurve:
    ring: Ring
    a: object
    b: object

    @classmethod
    def over_zmod(cls, p: int, k: int, a: int, b: int) -> "EllipticCurve":
        R = Zmod(p ** k)
        return cls(R, a % R.m, b % R.m)

    @property
    def p(self) -> int:
        return self.ring.p

    def check(self) -> "EllipticCurve":
        R = self.ring
        if self.p < 5:
            raise ValueError("curves need residue characteristic p >= 5")
        disc = R.add(R.mul(R.from_int(4), R.pow(self.a, 3)), R.mul(R.from_int(27), R.pow(self.b, 2)))
        if not R.is_unit(disc):
            raise SingularCurve(f"4a^3 + 27b^2 = {R.format(disc)} is not a unit")
        return self

    def j(self):
        return j_invariant(self)

    def reduce(self, k: int) -> "EllipticCurve":
        R = self.ring
        if isinstance(R, Zmod):
            q = R.p ** k
            return EllipticCurve(Zmod(q), self.a % q, self.b % q)
        S = GaloisRing(R.p, k, R.modulus)
        return EllipticCurve(S, R.reduce(self.a, k), R.reduce(self.b, k))

    def rhs(self, x):
        R = self.ring
        return R.add(R.add(R.pow(x, 3), R.mul(self.a, x)), self.b)

    def format(self) -> str:
        R = self.ring
        return f"y^2 = x^3 + {R.format(self.a)}*x + {R.format(self.b)} over {R!r}"


def j_invariant(E: EllipticCurve):
    R = E.ring
    a3 = R.mul(R.from_int(4), R.pow(E.a, 3))
    den = R.add(a3, R.mul(R.from_int(27), R.pow(E.b, 2)))
    try:
        inv = R.inv(den)
    except NotInvertible:
        raise SingularCurve(f"4a^3 + 27b^2 = {R.format(den)} is not a unit") from None
    return R.mul(R.mul(R.from_int(1728), a3), inv)


def curve_from_j(j, ring: Ring) -> EllipticCurve:
    """``a = 3j/(1728 - j)``, ``b = 2j/(1728 - j)``."""
    j = ring.from_int(j) if isinstance(j, int) else j
    p = ring.p
    if ring.is_zero(_reduce_p(ring, j)) or _reduce_p(ring, ring.sub(j, ring.from_int(1728))) == _reduce_p(ring, ring.zero):
        raise SpecialJ(f"j = {ring.format(j)} reduces to 0 or 1728 mod {p}")
    c = ring.inv(ring.sub(ring.from_int(1728), j))
    a = ring.mul(ring.mul(ring.from_int(3), j), c)
    b = ring.mul(ring.mul(ring.from_int(2), j), c)
    return EllipticCurve(ring, a, b)


def _reduce_p(ring: Ring, x):
    if isinstance(ring, Zmod):
        return x % ring.p
    return ring.reduce(x, 1)


def count_points_trace(E: EllipticCurve) -> Tuple[int, int]:
    """``(#E(F_p), a_p)`` by summing the quadratic character."""
    R = E.ring
    if not isinstance(R, Zmod) or R.k != 1:
        raise ValueError("point counting needs a prime field")
    p = R.m
    if p > 1000:
        raise ValueError("prime too large for enumeration")
    n = 1
    half = (p - 1) // 2
    for x in range(p):
        v = (x * x * x + E.a * x + E.b) % p
        if v == 0:
            n += 1
        elif pow(v, half, p) == 1:
            n += 2
    return n, p + 1 - n


def is_ordinary(E: EllipticCurve) -> bool:
    _, ap = count_points_trace(E)
    return ap % E.ring.m != 0


def _base_curve(E: EllipticCurve) -> EllipticCurve:
    R = E.ring
    if isinstance(R, Zmod):
        return EllipticCurve(Zmod(R.p), E.a % R.p, E.b % R.p)
    raise ValueError("base curve needs a Zmod ring")


# -- division polynomials ---------------------------------------------------------

def division_polynomial_dense(ring: Ring, a, b, m: int) -> list:
    """Reduced division polynomial ``g_m`` (``psi_m`` for odd ``m``, ``psi_m / 2y`` for even)."""
    return list(_division_table(ring, a, b, m)[m])


def _division_table(ring: Ring, a, b, m: int) -> Dict[int, list]:
    R = ring
    c = R.from_int
    U = upoly
    f = [b, a, R.zero, R.one]
    f2_16 = U.scale(R, U.mul(R, f, f), c(16))
    a2 = R.mul(a, a)
    table: Dict[int, list] = {
        0: [],
        1: [R.one],
        2: [R.one],
        3: U.trim(R, [R.neg(a2), R.mul(c(12), b), R.mul(c(6), a), R.zero, c(3)]),
        4: U.trim(R, [
            R.sub(R.neg(R.mul(c(2), R.pow(a, 3))), R.mul(c(16), R.mul(b, b))),
            R.neg(R.mul(c(8), R.mul(a, b))),
            R.neg(R.mul(c(10), a2)),
            R.mul(c(40), b),
            R.mul(c(10), a),
            R.zero,
            c(2),
        ]),
    }

    def g(i):
        if i in table:
            return table[i]
        k = i // 2
        if i % 2:
            first = U.mul(R, g(k + 2), U.mul(R, g(k), U.mul(R, g(k), g(k))))
            second = U.mul(R, g(k - 1), U.mul(R, g(k + 1), U.mul(R, g(k + 1), g(k + 1))))
            if k % 2 == 0:
                first = U.mul(R, f2_16, first)
            else:
                second = U.mul(R, f2_16, second)
            res = U.sub(R, first, second)
        else:
            inner = U.sub(
                R,
                U.mul(R, g(k + 2), U.mul(R, g(k - 1), g(k - 1))),
                U.mul(R, g(k - 2), U.mul(R, g(k + 1), g(k + 1))),
            )
            res = U.mul(R, g(k), inner)
        table[i] = res
        return res

    g(m)
    return table


def division_polynomial(E: EllipticCurve, m: int) -> SparsePoly:
    """``psi_m`` in ``x`` for odd ``m`` (degree ``(m^2 - 1)/2``)."""
    if m % 2 == 0 or m < 1 or m > 13:
        raise ValueError("odd m <= 13 only")
    dense = division_polynomial_dense(E.ring, E.a, E.b, m)
    return SparsePoly(("x",), {(i,): c for i, c in enumerate(dense) if not E.ring.is_zero(c)}, E.ring)


# -- Velu --------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelPolynomial:
    ring: Ring
    coeffs: Tuple  # monic, constant term first

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def format(self) -> str:
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if self.ring.is_zero(c):
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            cs = self.ring.format(c)
            terms.append(mono if (cs == "1" and mono) else (f"{cs}*{mono}" if mono else cs))
        return " + ".join(terms)


def power_sums(ring: Ring, coeffs: Sequence, count: int) -> list:
    """Power sums ``s_1..s_count`` of the roots of a monic polynomial (Newton's identities)."""
    d = len(coeffs) - 1
    # e_i = (-1)^i * coeffs[d - i]
    e = [ring.one] + [
        coeffs[d - i] if i % 2 == 0 else ring.neg(coeffs[d - i]) for i in range(1, d + 1)
    ]
    s = [ring.from_int(d)]
    for k in range(1, count + 1):
        acc = ring.zero
        for i in range(1, min(k, d) + 1):
            term = ring.mul(e[i], s[k - i]) if i < k else ring.mul(ring.from_int(k), e[k])
            acc = ring.add(acc, term) if i % 2 else ring.sub(acc, term)
        s.append(acc)
    return s[1:]


def velu_quotient(E: EllipticCurve, h: KernelPolynomial) -> EllipticCurve:
    """Image of ``E`` under the isogeny whose kernel has x-coordinates the roots of ``h``.

    Odd kernels use ``v = 6 s_2 + 2 a d`` and ``w = 10 s_3 + 6 a s_1 + 4 b d``.
    A kernel polynomial dividing ``x^3 + a x + b`` is read as 2-torsion
    (``v = 3 s_2 + a d``, ``w = 3 s_3 + a s_1``).
    """
    R = E.ring
    coeffs = list(h.coeffs)
    d = len(coeffs) - 1
    s1, s2, s3 = power_sums(R, coeffs, 3)
    c = R.from_int
    f = [E.b, E.a, R.zero, R.one]
    _, rem = upoly.divmod_(R, f, coeffs)
    if not rem:
        v = R.add(R.mul(c(3), s2), R.mul(E.a, c(d)))
        w = R.add(R.mul(c(3), s3), R.mul(E.a, s1))
    else:
        v = R.add(R.mul(c(6), s2), R.mul(c(2 * d), E.a))
        w = R.add(R.add(R.mul(c(10), s3), R.mul(c(6), R.mul(E.a, s1))), R.mul(c(4 * d), E.b))
    a2 = R.sub(E.a, R.mul(c(5), v))
    b2 = R.sub(E.b, R.mul(c(7), w))
    image = EllipticCurve(R, a2, b2)
    try:
        image.check()
    except SingularCurve as exc:
        raise SingularImage(str(exc)) from None
    return image


# -- the multiplicative (Frobenius) quotient ------------------------------------------

def _valuation(x: int, p: int) -> int:
    if x == 0:
        return 10 ** 9
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def connected_kernel_factor(E: EllipticCurve) -> list:
    """Monic ``G`` with ``G == u^d`` mod p whose roots are ``1/x`` of the connected p-torsion.

    Found by Hensel-factoring ``u^N psi_p(1/u)``, ``N = (p^2 - 1)/2``.
    """
    R = E.ring
    p, W = R.p, R.k
    d = (p - 1) // 2
    N = (p * p - 1) // 2
    psi = division_polynomial_dense(R, E.a, E.b, p)
    psi = psi + [R.zero] * (N + 1 - len(psi))
    rev = list(reversed(psi))
    low = [c % p for c in rev]
    if any(low[:d]) or low[d] == 0:
        raise NotOrdinary("reversed p-division polynomial does not vanish to order exactly (p-1)/2 at 0 mod p")
    hbar = upoly.trim(Zmod(p), low[d:])
    g0 = [0] * d + [1]
    G, H = upoly.hensel_factor(R, rev, g0, hbar, W + 1)
    if upoly.sub(R, rev, upoly.mul(R, G, H)):
        raise ArithmeticError("Hensel factorisation did not converge")
    return G


def frobenius_quotient_j(E: EllipticCurve) -> Tuple[int, int]:
    """``j`` of ``E / E[p]_conn`` as ``(value, precision)`` with precision the exponent of p."""
    R = E.ring
    p, W = R.p, R.k
    q = R.m
    d = (p - 1) // 2
    G = connected_kernel_factor(E)
    g = [G[i] if i < len(G) else 0 for i in range(max(4, d + 1))]
    g0, g1, g2, g3 = g[0], g[1], g[2], g[3]
    a, b = E.a, E.b
    A = (g0 * g0 * a - 5 * (6 * (g1 * g1 - 2 * g2 * g0) + 2 * a * d * g0 * g0)) % q
    B = (
        g0 ** 3 * b
        - 7 * (10 * (-(g1 ** 3) + 3 * g1 * g2 * g0 - 3 * g3 * g0 * g0) - 6 * a * g0 * g0 * g1 + 4 * b * d * g0 ** 3)
    ) % q
    # the quotient model is p-adically scaled; undo it with (A, B) -> (A/p^2e, B/p^3e)
    e = min(_valuation(A, p) // 2, _valuation(B, p) // 3)
    prec = W - 3 * e
    if prec < 1:
        raise SingularImage("quotient model degenerates at the working precision")
    mod = p ** prec
    A, B = (A // p ** (2 * e)) % mod, (B // p ** (3 * e)) % mod
    den = (4 * A ** 3 + 27 * B * B) % mod
    if den % p == 0:
        raise SingularImage("quotient curve has bad reduction")
    j = 1728 * 4 * A ** 3 * pow(den, -1, mod) % mod
    return j, prec


# -- the etale kernel --------------------------------------------------------------

def _ec_add(R: Ring, a, P, Q):
    """Affine chord-and-tangent addition; raises NotInvertible on a vertical line."""
    x1, y1 = P
    x2, y2 = Q
    if R.eq(x1, x2) and R.eq(y1, y2):
        lam = R.mul(R.add(R.mul(R.from_int(3), R.mul(x1, x1)), a), R.inv(R.mul(R.from_int(2), y1)))
    else:
        lam = R.mul(R.sub(y2, y1), R.inv(R.sub(x2, x1)))
    x3 = R.sub(R.sub(R.mul(lam, lam), x1), x2)
    y3 = R.sub(R.mul(lam, R.sub(x1, x3)), y1)
    return (x3, y3)


def unit_root_order(ap: int, p: int) -> int:
    """Multiplicative order of ``a_p`` mod p (the unit root reduces to ``a_p``)."""
    lam = ap % p
    if lam == 0:
        raise NotOrdinary("a_p is divisible by p")
    r, x = 1, lam
    while x != 1:
        x = x * lam % p
        r += 1
    return r


def _etale_x_roots(E0: EllipticCurve, field: GaloisRing) -> list:
    """x-coordinates of the nonzero etale p-torsion over ``field``."""
    p = field.p
    psi = division_polynomial_dense(Zmod(p), E0.a % p, E0.b % p, p)
    # psi_p mod p is a p-th power times a constant for ordinary curves; use its p-th root
    if all(c == 0 for i, c in enumerate(psi) if i % p):
        root_poly = [psi[i] for i in range(0, len(psi), p)]
    else:  # pragma: no cover - not observed for ordinary curves
        root_poly = psi
    lifted = [field.from_int(c) for c in root_poly]
    return upoly.field_roots(lifted, field)


def etale_kernel_poly(E: EllipticCurve, ap: int | None = None, root_index: int = 0) -> KernelPolynomial:
    """Kernel polynomial of the order-p subgroup of ``E[p]`` lifting the etale quotient.

    ``E`` lives over ``Z/p^K``; the result has coefficients in ``Z/p^(K-1)``
    because the last p-adic digit of the torsion point's x-coordinate is
    not determined at precision ``K``.  Raises ``NoEtaleLift`` when no
    unramified order-p lift exists (the curve is not canonical mod p^2).
    """
    R = E.ring
    p, K = R.p, R.k
    if K < 2:
        raise ValueError("need precision at least 2")
    E0 = EllipticCurve(Zmod(p), E.a % p, E.b % p)
    if ap is None:
        _, ap = count_points_trace(E0)
    r = unit_root_order(ap, p)
    field = GaloisRing(p, 1, degree=r)
    roots = _etale_x_roots(E0, field)
    if not roots:
        raise BadReduction("no etale p-torsion x-coordinate found over the residue field")
    x_res = roots[root_index % len(roots)]
    S = GaloisRing(p, K, field.modulus)
    a, b = S.from_int(E.a), S.from_int(E.b)
    curve = EllipticCurve(S, a, b)
    fres = EllipticCurve(field, field.from_int(E.a), field.from_int(E.b))
    ys = upoly.field_roots([field.neg(fres.rhs(x_res)), field.zero, field.one], field)
    if not ys:
        raise BadReduction("x-coordinate has no point over the residue field")
    y_res = ys[0]

    def point_at(x):
        target = curve.rhs(x)
        poly = [S.neg(target), S.zero, S.one]
        y = upoly.hensel_root(poly, S, tuple(y_res))
        return (x, y)

    def rho(x):
        Q = point_at(x)
        M = Q
        for _ in range(p - 2):
            M = _ec_add(S, a, M, Q)
        return S.sub(M[0], Q[0]), Q

    x = tuple(x_res)
    val, _ = rho(x)
    if any(c % (p * p) for c in val):
        raise NoEtaleLift("the etale p-torsion point does not lift over an unramified ring")
    # digit j of x controls digit j+1 of rho
    for j in range(1, K - 1):
        val, _ = rho(x)
        if not any(c % p ** (j + 2) for c in val):
            continue
        step = S.from_int(p ** j)
        val2, _ = rho(S.add(x, step))
        gamma = tuple(((c2 - c1) // p ** (j + 1)) % p for c1, c2 in zip(val, val2))
        digit = tuple((c // p ** (j + 1)) % p for c in val)
        gamma_f, digit_f = field.reduce(gamma, 1), field.reduce(digit, 1)
        tau = field.neg(field.mul(digit_f, field.inv(gamma_f)))
        x = S.add(x, S.mul(step, S.reduce(tuple(tau), K)))
    val, Q = rho(x)
    if any(c % p ** K for c in val):
        raise ArithmeticError("digit solve failed to produce a p-torsion point")
    d = (p - 1) // 2
    xs = [Q[0]]
    M = Q
    for _ in range(d - 1):
        M = _ec_add(S, a, M, Q)
        xs.append(M[0])
    h = [S.one]
    for xi in xs:
        h = upoly.mul(S, h, [S.neg(xi), S.one])
    low = GaloisRing(p, K - 1, field.modulus) if K > 1 else None
    q = p ** (K - 1)
    out = []
    for c in h:
        c = low.reduce(c, K - 1)
        scalar = low.scalar(c)
        if scalar is None:
            raise ArithmeticError("kernel polynomial does not descend to Z/p^k")
        out.append(scalar)
    return KernelPolynomial(Zmod(q), tuple(out))


# -- the canonical lift ----------------------------------------------------------------

@dataclass
class LiftResult:
    p: int
    k: int
    j: int
    trace: List[int]
    iterations: int
    curve: EllipticCurve  # canonical curve at the working precision

    def j_mod(self, k: int) -> int:
        return self.j % self.p ** k


def _validate_base(E0: EllipticCurve) -> int:
    R = E0.ring
    if not isinstance(R, Zmod) or R.k != 1:
        raise ValueError("the input curve must live over a prime field")
    p = R.m
    if p not in SUPPORTED_PRIMES:
        raise Unsupported(f"p = {p} is outside the supported set {SUPPORTED_PRIMES}")
    E0.check()
    j0 = j_invariant(E0)
    if j0 in (0, 1728 % p):
        raise SpecialJ(f"j = {j0} is 0 or 1728 mod {p}")
    n, ap = count_points_trace(E0)
    if ap % p == 0:
        raise NotOrdinary(f"a_p = {ap} is divisible by {p}")
    return ap


def working_precision(k: int) -> int:
    return k + 12


def match_reduction(E: EllipticCurve, a0: int, b0: int) -> EllipticCurve:
    """Rescale ``E`` by ``(mu^2 a, mu^3 b)`` so it reduces to ``(a0, b0)`` rather than a twist.

    Needs ``j(E) == j(a0, b0)`` mod p and ``a0 b0 != 0``; ``j`` is unchanged.
    """
    R = E.ring
    p = R.p
    if (E.a * E.b) % p == 0 or (a0 * b0) % p == 0:
        raise SpecialJ("rescaling needs a, b to be units")
    mu = b0 * E.a * pow(a0 * E.b, -1, R.m) % R.m
    out = EllipticCurve(R, mu * mu * E.a % R.m, mu ** 3 * E.b % R.m)
    if (out.a - a0) % p or (out.b - b0) % p:
        raise Mismatch("curve does not reduce to the requested j-invariant")
    return out


def frobenius_step(E: EllipticCurve, k: int) -> Tuple[int, EllipticCurve]:
    """One quotient step; returns the new ``j`` mod ``p^k`` and the new curve (working precision kept).

    The new curve is normalised to have the same reduction as ``E``.
    """
    R = E.ring
    j, prec = frobenius_quotient_j(E)
    if prec < k:
        raise SingularImage("precision loss exceeded the margin")
    nxt = match_reduction(curve_from_j(j % R.m, R), E.a % R.p, E.b % R.p)
    return j % R.p ** k, nxt


def canonical_lift_j(E0: EllipticCurve, k: int, start_j: int | None = None, max_iter: int | None = None) -> LiftResult:
    """``j`` of the canonical lift of ``E0`` modulo ``p^k``.

    Starts from the naive lift of ``(a, b)`` (or ``curve_from_j(start_j)``)
    and iterates the connected-kernel quotient until ``j`` repeats mod p^k.
    """
    _validate_base(E0)
    p = E0.ring.m
    if k < 1:
        raise ValueError("precision must be at least 1")
    W = working_precision(k)
    R = Zmod(p ** W)
    if start_j is None:
        E = EllipticCurve(R, E0.a, E0.b)
    else:
        if (start_j - j_invariant(E0)) % p:
            raise ValueError("start_j must reduce to j(E) mod p")
        E = match_reduction(curve_from_j(start_j % R.m, R), E0.a, E0.b)
    qk = p ** k
    j = j_invariant(E) % qk
    trace = [j]
    cap = max_iter if max_iter is not None else max(4 * (k - 1), 1)
    for it in range(1, cap + 1):
        j_next, E_next = frobenius_step(E, k)
        trace.append(j_next)
        if j_next == j:
            return LiftResult(p, k, j, trace, it, E)
        j, E = j_next, E_next
    raise NoConvergence(f"no fixed point within {cap} iterations", trace)


# -- CM oracle -------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _default_cm_table() -> Dict[int, Tuple[int, ...]]:
    return parse_cm_table(resources.files("wittkit.data").joinpath("cm_table.txt").read_text())


def parse_cm_table(text: str) -> Dict[int, Tuple[int, ...]]:
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            D, *coeffs = (int(t) for t in line.split())
        except ValueError:
            raise ValueError(f"cm table line {lineno}: not integers") from None
        if not coeffs or coeffs[-1] != 1:
            raise ValueError(f"cm table line {lineno}: polynomial must be monic")
        table[D] = tuple(coeffs)
    return table


def load_cm_table(path: str | None = None) -> Dict[int, Tuple[int, ...]]:
    if path is None:
        return _default_cm_table()
    with open(path) as fh:
        return parse_cm_table(fh.read())


def is_fundamental(D: int) -> bool:
    if D >= 0:
        return False
    if D % 4 == 1:
        return _squarefree(-D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(-m)
    return False


def _squarefree(n: int) -> bool:
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1
    return True


def cm_oracle_j(E0: EllipticCurve, k: int, table: Dict[int, Tuple[int, ...]] | None = None) -> int:
    """Tabulated CM j-invariant for ``D = a_p^2 - 4p`` reduced mod ``p^k``."""
    table = table if table is not None else _default_cm_table()
    p = E0.ring.m
    _, ap = count_points_trace(E0)
    D = ap * ap - 4 * p
    if not is_fundamental(D):
        raise Unsupported(f"D = {D} is not a fundamental discriminant")
    coeffs = table.get(D)
    if coeffs is None or len(coeffs) != 2:
        raise Unsupported(f"D = {D} is not tabulated with class number 1")
    j = -coeffs[0]
    if (j - j_invariant(E0)) % p:
        raise Mismatch(f"tabulated j = {j} for D = {D} does not reduce to j(E) = {j_invariant(E0)} mod {p}")
    return j % p ** k


# -- the V o F check -------------------------------------------------------------------------

@dataclass
class VPReport:
    p: int
    k: int
    j_canonical: int
    j_after_frobenius: int
    j_after_verschiebung: int | None
    kernel: KernelPolynomial | None
    trace: List[int]

    @property
    def frobenius_fixed(self) -> bool:
        return self.j_after_frobenius == self.j_canonical

    @property
    def verschiebung_fixed(self) -> bool:
        return self.j_after_verschiebung == self.j_canonical

    @property
    def passed(self) -> bool:
        return self.frobenius_fixed and self.verschiebung_fixed


def verify_vp_factorization(E0: EllipticCurve, k: int) -> VPReport:
    """At the canonical lift, both halves of ``[p] = v o f`` map the curve to itself.

    The Frobenius half (connected-kernel quotient) is checked at precision
    ``k``; the Verschiebung half uses the etale kernel, built from the lift at
    precision ``k + 1`` because that construction loses one digit.
    """
    _validate_base(E0)
    p = E0.ring.m
    qk = p ** k
    lift = canonical_lift_j(E0, k + 1)
    j_can = lift.j % qk
    j_f, _ = frobenius_step(lift.curve, k)
    if k == 1:
        return VPReport(p, k, j_can, j_f, j_can, None, lift.trace)
    canon = lift.curve.reduce(k + 1)
    h = etale_kernel_poly(canon)
    image = velu_quotient(canon.reduce(k), h)
    j_v = j_invariant(image) % qk
    return VPReport(p, k, j_can, j_f, j_v, h, lift.trace)


def etale_quotient_trace(E: EllipticCurve) -> int:
    """Trace of Frobenius on the quotient of ``E mod p`` by the reduced etale kernel."""
    p = E.ring.p
    h = etale_kernel_poly(E)
    hbar = KernelPolynomial(Zmod(p), tuple(c % p for c in h.coeffs))
    return count_points_trace(velu_quotient(E.reduce(1), hbar))[1]
