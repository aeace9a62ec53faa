"""delta-structures: truncated towers, polynomial rings, and Frobenius lifts.

A ``DeltaTower`` is the finite surrogate used throughout: rings
``R_0 <- R_1 <- ... <- R_N`` with surjections ``tau_m`` and degree-shifting
maps ``delta_m: R_{m+1} -> R_m``.  On ``Z/p^k`` no genuine endomorphism
``delta`` exists, but the shifted axioms make sense and are checkable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Dict, List, Sequence, Tuple

from .substrate.poly import NotDivisible, SparsePoly, poly_exact_div_by_int
from .substrate.rings import ZZ, ProductRing, Ring, Zmod
from .witt import WittRing


class NotAFrobeniusLift(ArithmeticError):
    pass


class UnsupportedPresentation(ValueError):
    pass


def fermat_quotient(x: int, p: int) -> int:
    """The unique delta on the integers: ``(x - x^p) / p``."""
    return (x - x ** p) // p


# -- towers -------------------------------------------------------------------

@dataclass
class DeltaTower:
    p: int
    rings: List[Ring]
    delta: Callable[[int, object], object]  # delta(m, x) with x in R_{m+1}, result in R_m
    tau: Callable[[int, object], object]
    name: str = "custom"
    lifts: Callable[[int, object], List[object]] | None = None  # alternative representatives

    @property
    def top(self) -> int:
        return len(self.rings) - 1

    @classmethod
    def fermat(cls, p: int, levels: int) -> "DeltaTower":
        """``R_m = Z/p^(m+1)`` with the Fermat quotient of the least representative."""
        rings = [Zmod(p ** (m + 1)) for m in range(levels)]

        def delta(m, x):
            return fermat_quotient(x, p) % p ** (m + 1)

        def tau(m, x):
            return x % p ** (m + 1)

        def lifts(m, x):
            # another integer representative of the same class of R_{m+1}
            return [x + p ** (m + 2)]

        return cls(p, rings, delta, tau, "fermat", lifts)

    @classmethod
    def zero(cls, p: int, levels: int) -> "DeltaTower":
        rings = [Zmod(p ** (m + 1)) for m in range(levels)]
        return cls(p, rings, lambda m, x: 0, lambda m, x: x % p ** (m + 1), "zero")

    @classmethod
    def witt(cls, p: int, levels: int, base: Ring | None = None) -> "DeltaTower":
        """``R_m = W_m(base)`` with delta the shift and tau the truncation."""
        base = base or Zmod(p)
        rings = [WittRing(base, p, m) for m in range(levels)]
        return cls(
            p,
            rings,
            lambda m, x: rings[m + 1].delta_shift(x),
            lambda m, x: rings[m + 1].truncate(x),
            "witt",
        )

    @classmethod
    def product(cls, tower: "DeltaTower", r: int) -> "DeltaTower":
        """Componentwise tower on ``R_m^r``."""
        rings = [ProductRing(R, r) for R in tower.rings]
        return cls(
            tower.p,
            rings,
            lambda m, x: tuple(tower.delta(m, c) for c in x),
            lambda m, x: tuple(tower.tau(m, c) for c in x),
            f"{tower.name}^{r}",
        )

    @classmethod
    def named(cls, name: str, p: int, levels: int) -> "DeltaTower":
        builders = {"fermat": cls.fermat, "zero": cls.zero, "witt": cls.witt}
        if name not in builders:
            raise ValueError(f"unknown tower {name!r}; choose from {sorted(builders)}")
        return builders[name](p, levels)


@dataclass
class Failure:
    axiom: str
    level: int
    x: object
    y: object
    lhs: object
    rhs: object

    def describe(self, tower: DeltaTower) -> str:
        lo = tower.rings[self.level]
        fmt = getattr(lo, "format", str)
        hi = getattr(tower.rings[self.level + 1], "format", str)
        args = hi(self.x) if self.y is None else f"{hi(self.x)}, {hi(self.y)}"
        return f"axiom {self.axiom} fails at level {self.level} for ({args}): {fmt(self.lhs)} != {fmt(self.rhs)}"


@dataclass
class DeltaReport:
    passed: bool
    checked: int
    failures: List[Failure] = field(default_factory=list)


def _sum_correction(R: Ring, p: int, a, b):
    """``sum_{i=1}^{p-1} (1/p) C(p,i) a^i b^(p-i)`` in ``R``."""
    acc = R.zero
    for i in range(1, p):
        term = R.mul(R.pow(a, i), R.pow(b, p - i))
        acc = R.add(acc, R.mul(R.from_int(comb(p, i) // p), term))
    return acc


def check_axioms_at(tower: DeltaTower, m: int, x, y) -> List[Failure]:
    """Axioms (sum rule, product rule) on one pair at level ``m``."""
    p = tower.p
    hi, lo = tower.rings[m + 1], tower.rings[m]
    d, t = tower.delta, tower.tau
    dx, dy = d(m, x), d(m, y)
    tx, ty = t(m, x), t(m, y)
    out = []
    lhs = d(m, hi.add(x, y))
    rhs = lo.sub(lo.add(dx, dy), _sum_correction(lo, p, tx, ty))
    if not lo.eq(lhs, rhs):
        out.append(Failure("sum", m, x, y, lhs, rhs))
    lhs = d(m, hi.mul(x, y))
    rhs = lo.add(
        lo.add(lo.mul(lo.pow(tx, p), dy), lo.mul(dx, lo.pow(ty, p))),
        lo.mul(lo.from_int(p), lo.mul(dx, dy)),
    )
    if not lo.eq(lhs, rhs):
        out.append(Failure("product", m, x, y, lhs, rhs))
    return out


def validate_delta(tower: DeltaTower, sample: str | int = "exhaustive", seed: int = 0,
                   max_failures: int = 20) -> DeltaReport:
    """Check delta(1) = 0, the sum rule and the product rule on every level.

    ``sample`` is ``"exhaustive"`` or a count of random pairs per level.
    Towers given by representatives also get a well-definedness check.
    """
    rng = random.Random(seed)
    failures: List[Failure] = []
    checked = 0
    for m in range(tower.top):
        hi, lo = tower.rings[m + 1], tower.rings[m]
        one = tower.delta(m, hi.one)
        checked += 1
        if not lo.is_zero(one):
            failures.append(Failure("unit", m, hi.one, None, one, lo.zero))
        if sample == "exhaustive":
            elems = list(hi.elements())
            pairs = itertools.product(elems, repeat=2)
        else:
            count = int(sample)
            pairs = ((hi.random_element(rng), hi.random_element(rng)) for _ in range(count))
        seen = set()
        for x, y in pairs:
            checked += 1
            failures.extend(check_axioms_at(tower, m, x, y))
            if tower.lifts is not None and x not in seen:
                seen.add(x)
                for alt in tower.lifts(m, x):
                    if not lo.eq(tower.delta(m, alt), tower.delta(m, x)):
                        failures.append(Failure("well-defined", m, x, alt, tower.delta(m, alt), tower.delta(m, x)))
            if len(failures) >= max_failures:
                return DeltaReport(False, checked, failures)
    return DeltaReport(not failures, checked, failures)


def apply_delta(x, context, level: int | None = None):
    """delta of ``x`` in a tower (``x`` in ``R_{level+1}``) or a ``DeltaPolyRing``."""
    if isinstance(context, DeltaTower):
        if level is None:
            level = context.top - 1
        return context.delta(level, x)
    if isinstance(context, DeltaPolyRing):
        return context.delta(x)
    if context is ZZ or context == ZZ:
        return fermat_quotient(x, context_p(x))
    raise TypeError(f"no delta context {context!r}")


def context_p(_x):  # pragma: no cover - guard for misuse
    raise TypeError("apply_delta on ZZ needs a DeltaPolyRing or explicit p")


# -- polynomial rings ----------------------------------------------------------

class DeltaPolyRing:
    """``Z[T_1..T_r]`` with prescribed ``delta(T_i)``.

    ``delta`` on other elements follows the sum and product rules, with the
    Fermat quotient on integer constants.  ``delta_via_frobenius`` computes
    the same map as ``(phi(f) - f^p) / p`` and serves as a cross-check.
    """

    def __init__(self, p: int, variables: Sequence[str], deltas: Sequence[SparsePoly]):
        self.p = p
        self.variables = tuple(variables)
        if len(deltas) != len(self.variables):
            raise ValueError("need one delta value per generator")
        self.deltas = tuple(d.embed(self.variables) for d in deltas)
        self.zero = SparsePoly.zero(self.variables)
        self.one = SparsePoly.const(1, self.variables)

    def gens(self) -> List[SparsePoly]:
        return SparsePoly.gens(self.variables)

    def _sum_rule(self, a: SparsePoly, da: SparsePoly, b: SparsePoly, db: SparsePoly) -> SparsePoly:
        p = self.p
        corr = self.zero
        for i in range(1, p):
            corr = corr + (comb(p, i) // p) * (a ** i * b ** (p - i))
        return da + db - corr

    def _product_rule(self, a, da, b, db) -> SparsePoly:
        p = self.p
        return a ** p * db + da * b ** p + p * (da * db)

    def delta_monomial(self, exps: Tuple[int, ...], coeff: int) -> SparsePoly:
        value = SparsePoly.const(coeff, self.variables)
        dvalue = SparsePoly.const(fermat_quotient(coeff, self.p), self.variables)
        gens = self.gens()
        for i, k in enumerate(exps):
            for _ in range(k):
                dvalue = self._product_rule(value, dvalue, gens[i], self.deltas[i])
                value = value * gens[i]
        return dvalue

    def delta(self, f: SparsePoly, order: Sequence | None = None) -> SparsePoly:
        """delta by the rules, folding the terms in ``order`` (default canonical)."""
        f = f.embed(self.variables)
        terms = list(order) if order is not None else f.sorted_terms()
        if not terms:
            return self.zero
        acc = SparsePoly(self.variables, {terms[0][0]: terms[0][1]})
        dacc = self.delta_monomial(*terms[0])
        for e, c in terms[1:]:
            mono = SparsePoly(self.variables, {e: c})
            dacc = self._sum_rule(acc, dacc, mono, self.delta_monomial(e, c))
            acc = acc + mono
        return dacc

    def frobenius_images(self) -> List[SparsePoly]:
        return [g ** self.p + self.p * d for g, d in zip(self.gens(), self.deltas)]

    def frobenius(self, f: SparsePoly) -> SparsePoly:
        return f.embed(self.variables).compose(self.frobenius_images())

    def delta_via_frobenius(self, f: SparsePoly) -> SparsePoly:
        f = f.embed(self.variables)
        return poly_exact_div_by_int(self.frobenius(f) - f ** self.p, self.p)

    def validate(self, samples: Sequence[SparsePoly]) -> DeltaReport:
        """Sum/product rules and agreement with the Frobenius route on sample pairs."""
        failures = []
        checked = 0
        for f, g in itertools.product(samples, repeat=2):
            checked += 1
            df, dg = self.delta(f), self.delta(g)
            if self.delta(f + g) != self._sum_rule(f, df, g, dg):
                failures.append(Failure("sum", 0, f, g, self.delta(f + g), None))
            if self.delta(f * g) != self._product_rule(f, df, g, dg):
                failures.append(Failure("product", 0, f, g, self.delta(f * g), None))
        for f in samples:
            if self.delta(f) != self.delta_via_frobenius(f):
                failures.append(Failure("frobenius", 0, f, None, self.delta(f), self.delta_via_frobenius(f)))
        if not self.delta(self.one).is_zero():
            failures.append(Failure("unit", 0, self.one, None, self.delta(self.one), self.zero))
        return DeltaReport(not failures, checked, failures)


@dataclass
class RingPresentation:
    """``Z[generators] / (relations)``."""

    generators: Tuple[str, ...]
    relations: Tuple[SparsePoly, ...] = ()


@dataclass
class FrobeniusLift:
    p: int
    images: Tuple[SparsePoly, ...]
    variables: Tuple[str, ...]

    def __call__(self, f: SparsePoly) -> SparsePoly:
        return f.embed(self.variables).compose(list(self.images))


def delta_from_frobenius(pres: RingPresentation, images: Sequence[SparsePoly], p: int) -> DeltaPolyRing:
    """``delta(g) = (phi(g) - g^p) / p`` for each generator.

    Relations must vanish mod p (so the reduction test can run in
    ``F_p[generators]``); any such relation exhibits p-torsion, which makes
    the quotient by p non-unique, so a lift that passes the reduction test on
    such a presentation is rejected with ``NotDivisible``.
    """
    variables = tuple(pres.generators)
    images = [f.embed(variables) for f in images]
    for rel in pres.relations:
        if any(c % p for c in rel.embed(variables).terms.values()):
            raise UnsupportedPresentation("relations must vanish mod p")
    gens = SparsePoly.gens(variables)
    deltas = []
    for g, img in zip(gens, images):
        diff = img - g ** p
        bad = [(e, c) for e, c in diff.terms.items() if c % p]
        if bad:
            raise NotAFrobeniusLift(f"phi({g}) = {img} is not congruent to {g}^{p} mod {p}")
        if pres.relations:
            # divisible in Z[gens], but p-torsion in the quotient leaves delta undetermined
            rel = pres.relations[0].embed(variables)
            exc = NotDivisible(next(iter(rel.terms.items())), p)
            exc.args = (f"relation {rel} is p-torsion, so ({img} - {g}^{p})/{p} is not determined",)
            raise exc
        deltas.append(poly_exact_div_by_int(diff, p))
    return DeltaPolyRing(p, variables, deltas)


def frobenius_from_delta(context, level: int | None = None):
    """``phi(x) = x^p + p delta(x)``.

    For a ``DeltaPolyRing`` returns the ``FrobeniusLift``; for a tower
    returns a function ``R_{level+1} -> R_level``.
    """
    if isinstance(context, DeltaPolyRing):
        return FrobeniusLift(context.p, tuple(context.frobenius_images()), context.variables)
    if isinstance(context, DeltaTower):
        m = context.top - 1 if level is None else level
        lo = context.rings[m]
        p = context.p

        def phi(x):
            return lo.add(lo.pow(context.tau(m, x), p), lo.mul(lo.from_int(p), context.delta(m, x)))

        return phi
    raise TypeError(f"no delta context {context!r}")


# -- Hopf compatibility on products of mu_{p^n} ---------------------------------

@dataclass
class HopfSolveReport:
    p: int
    exponents: Tuple[int, ...]
    k: int
    basis: Tuple[Tuple[int, ...], ...]
    solutions: List[Tuple[Tuple[int, ...], ...]]  # one coefficient vector per generator
    stable: bool | None = None  # agrees with level k+1 reduced mod p^k

    def describe(self) -> str:
        lines = [f"p={self.p} exponents={list(self.exponents)} k={self.k} basis size={len(self.basis)}"]
        lines.append(f"solutions: {len(self.solutions)}")
        for sol in self.solutions:
            parts = []
            for i, coeffs in enumerate(sol):
                nz = [(I, a) for I, a in zip(self.basis, coeffs) if a]
                if not nz:
                    parts.append(f"delta(T{i + 1}) = 0")
                else:
                    body = " + ".join(f"{a}*T^{list(I)}" for I, a in nz)
                    parts.append(f"delta(T{i + 1}) = {body}")
            lines.append("  " + "; ".join(parts) if parts else "  (no generators)")
        if self.stable is not None:
            lines.append(f"stable under k -> k+1: {'yes' if self.stable else 'no'}")
        return "\n".join(lines)


def _hopf_equations_ok(p, q, basis, index, pe, a) -> bool:
    """All coefficient equations for one generator with coefficient vector ``a``."""
    for x, I in enumerate(basis):
        for y, J in enumerate(basis):
            lhs = a[x] if x == y else 0
            rhs = (a[y] if I == pe else 0) + (a[x] if J == pe else 0) + p * a[x] * a[y]
            if (lhs - rhs) % q:
                return False
    return True


def _solve_generator(p: int, q: int, basis, pe) -> List[Tuple[int, ...]]:
    # diagonal equations restrict each coefficient independently
    candidates = []
    for I in basis:
        twice = 2 if I == pe else 0
        cands = [a for a in range(q) if (a - twice * a - p * a * a) % q == 0]
        candidates.append(cands)
    index = {I: x for x, I in enumerate(basis)}
    sols = []
    for a in itertools.product(*candidates):
        if _hopf_equations_ok(p, q, basis, index, pe, a):
            sols.append(tuple(a))
    return sols


def hopf_delta_solve(p: int, exponents: Sequence[int], k: int, check_stability: bool = True) -> HopfSolveReport:
    """All Hopf-compatible ``delta(T_i) = sum_I a_{I,i} T^I`` over ``Z/p^k``.

    The Hopf algebra is ``prod_i Z/p^k[T_i]/(T_i^(p^(n_i)) - 1)`` with every
    ``T^I`` group-like; ``T_i^p`` is reduced using ``T_i^(p^(n_i)) = 1``.
    """
    exponents = tuple(int(e) for e in exponents)
    q = p ** k
    orders = [p ** e for e in exponents]
    basis = tuple(itertools.product(*[range(o) for o in orders]))
    per_gen = []
    for i in range(len(exponents)):
        pe = tuple((p % orders[j]) if j == i else 0 for j in range(len(exponents)))
        per_gen.append(_solve_generator(p, q, basis, pe))
    solutions = [tuple(s) for s in itertools.product(*per_gen)]
    report = HopfSolveReport(p, exponents, k, basis, solutions)
    if check_stability:
        upper = hopf_delta_solve(p, exponents, k + 1, check_stability=False)
        reduced = sorted({tuple(tuple(c % q for c in a) for a in sol) for sol in upper.solutions})
        report.stable = reduced == sorted(solutions)
    return report


def monomial_delta_vanishes(p: int, n: int, k: int, e: int) -> bool:
    """With ``delta(T) = 0`` on ``Z/p^k[T]/(T^(p^n) - 1)``, is ``delta(T^e) = 0``?

    Computed by iterating the product rule on coefficient vectors.
    """
    q = p ** k
    order = p ** n

    def mul(a, b):
        out = [0] * order
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[(i + j) % order] = (out[(i + j) % order] + x * y) % q
        return out

    def powp(a):
        r = [1] + [0] * (order - 1)
        for _ in range(p):
            r = mul(r, a)
        return r

    t = [0] * order
    t[1 % order] = (t[1 % order] + 1) % q
    value = [1] + [0] * (order - 1)
    dvalue = [0] * order
    dt = [0] * order
    for _ in range(e):
        new = [
            (u + v + p * w) % q
            for u, v, w in zip(mul(powp(value), dt), mul(dvalue, powp(t)), mul(dvalue, dt))
        ]
        dvalue = new
        value = mul(value, t)
    return not any(dvalue)
