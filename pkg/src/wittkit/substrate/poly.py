"""Sparse multivariate polynomials over ``ZZ`` or a finite coefficient ring.

Terms live in a dict from exponent tuples (one entry per declared variable)
to nonzero coefficients.  Instances are treated as immutable.  Canonical
order is graded lexicographic over the declared variable list, largest term
first; it fixes printing, the cache text form and golden files.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .. import kernels
from .rings import ZZ, Ring

Exps = Tuple[int, ...]


class NotDivisible(ArithmeticError):
    """Raised when an exact division leaves a remainder."""

    def __init__(self, term, divisor):
        exps, coeff = term
        super().__init__(f"coefficient {coeff} at exponent {exps} is not divisible by {divisor}")
        self.term = term
        self.divisor = divisor


def _graded_lex_key(exps: Exps):
    return (sum(exps), exps)


class SparsePoly:
    __slots__ = ("variables", "terms", "ring")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exps, object] | None = None, ring: Ring = ZZ):
        self.variables = tuple(variables)
        self.ring = ring
        n = len(self.variables)
        clean: Dict[Exps, object] = {}
        if terms:
            is_zero = ring.is_zero
            for e, c in terms.items():
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match variables {self.variables}")
                if not is_zero(c):
                    clean[tuple(e)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, variables, ring: Ring = ZZ):
        return cls(variables, {}, ring)

    @classmethod
    def const(cls, c, variables, ring: Ring = ZZ):
        c = ring.from_int(c) if isinstance(c, int) else c
        return cls(variables, {(0,) * len(variables): c}, ring)

    @classmethod
    def var(cls, name: str, variables, ring: Ring = ZZ):
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): ring.one}, ring)

    @classmethod
    def gens(cls, variables, ring: Ring = ZZ) -> List["SparsePoly"]:
        return [cls.var(v, variables, ring) for v in variables]

    # -- basic queries ------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficient(self, exps: Exps):
        return self.terms.get(tuple(exps), self.ring.zero)

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def sorted_terms(self) -> List[Tuple[Exps, object]]:
        return sorted(self.terms.items(), key=lambda t: _graded_lex_key(t[0]), reverse=True)

    def weights(self, weight: Sequence[int]) -> set:
        """Set of weighted degrees of the terms."""
        return {sum(w * x for w, x in zip(weight, e)) for e in self.terms}

    def max_coeff_bits(self) -> int:
        return max((abs(c).bit_length() for c in self.terms.values()), default=0)

    def l1_norm(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        return SparsePoly.const(other, self.variables, self.ring)

    def __add__(self, other):
        other = self._coerce(other)
        ring = self.ring
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = ring.add(out[e], c) if e in out else c
        return SparsePoly(self.variables, out, ring)

    __radd__ = __add__

    def __neg__(self):
        ring = self.ring
        return SparsePoly(self.variables, {e: ring.neg(c) for e, c in self.terms.items()}, ring)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int) and self.ring is ZZ:
            if other == 0:
                return SparsePoly(self.variables, {}, ZZ)
            return SparsePoly(self.variables, {e: c * other for e, c in self.terms.items()}, ZZ)
        other = self._coerce(other)
        if self.ring is ZZ or self.ring == ZZ:
            return SparsePoly(self.variables, kernels.mul_exact(self.terms, other.terms, self.nvars), ZZ)
        ring = self.ring
        acc: Dict[Exps, object] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                p = ring.mul(ca, cb)
                acc[e] = ring.add(acc[e], p) if e in acc else p
        return SparsePoly(self.variables, acc, ring)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = SparsePoly.const(1, self.variables, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, int):
            return self == SparsePoly.const(other, self.variables, self.ring)
        return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # -- structural operations ---------------------------------------
    def embed(self, variables: Sequence[str]) -> "SparsePoly":
        """Re-express over a different variable list containing all used variables."""
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        used = [i for i in range(self.nvars) if any(e[i] for e in self.terms)]
        for i in used:
            if self.variables[i] not in index:
                raise ValueError(f"variable {self.variables[i]} missing from target list")
        out = {}
        for e, c in self.terms.items():
            new = [0] * len(variables)
            for i in used:
                new[index[self.variables[i]]] = e[i]
            out[tuple(new)] = c
        return SparsePoly(variables, out, self.ring)

    def rename(self, mapping: Mapping[str, str]) -> "SparsePoly":
        return SparsePoly([mapping.get(v, v) for v in self.variables], self.terms, self.ring)

    def compose(self, subs: Sequence["SparsePoly"]) -> "SparsePoly":
        """Substitute ``subs[i]`` for variable ``i`` (all ``subs`` share one variable list)."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitute per variable")
        target = subs[0].variables if subs else ()
        ring = self.ring
        powers: Dict[Tuple[int, int], SparsePoly] = {}

        def power(i, k):
            key = (i, k)
            if key not in powers:
                if k == 1:
                    powers[key] = subs[i]
                else:
                    half = power(i, k // 2)
                    sq = half * half
                    powers[key] = sq * subs[i] if k % 2 else sq
            return powers[key]

        acc: Dict[Exps, object] = {}
        add = ring.add
        for e, c in self.sorted_terms():
            factors = sorted((power(i, k) for i, k in enumerate(e) if k), key=len)
            term = SparsePoly.const(c, target, ring)
            for f in factors:
                term = term * f
            for te, tc in term.terms.items():
                acc[te] = add(acc[te], tc) if te in acc else tc
        return SparsePoly(target, acc, ring)

    def evaluate(self, values: Sequence, ring: Ring):
        """Value at ``values`` in ``ring``; integer coefficients map through ``from_int``."""
        acc = ring.zero
        cache: Dict[Tuple[int, int], object] = {}
        from_int = ring.from_int
        same = ring == self.ring
        for e, c in self.terms.items():
            term = c if same else from_int(c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = ring.pow(values[i], k)
                    term = ring.mul(term, cache[key])
            acc = ring.add(acc, term)
        return acc

    def map_coefficients(self, ring: Ring, fn=None) -> "SparsePoly":
        fn = fn or ring.from_int
        return SparsePoly(self.variables, {e: fn(c) for e, c in self.terms.items()}, ring)

    def exact_div(self, c: int) -> "SparsePoly":
        return poly_exact_div_by_int(self, c)

    def derivative(self, name: str) -> "SparsePoly":
        i = self.variables.index(name)
        ring = self.ring
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                new = list(e)
                new[i] -= 1
                out[tuple(new)] = ring.mul(ring.from_int(e[i]), c)
        return SparsePoly(self.variables, out, ring)

    # -- text forms ----------------------------------------------------
    def to_text(self) -> str:
        """Canonical one-term-per-line form ``<coeff> <var>:<exp> ...``."""
        lines = []
        for e, c in self.sorted_terms():
            parts = [str(c)] + [f"{v}:{k}" for v, k in zip(self.variables, e) if k]
            lines.append(" ".join(parts))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, variables: Sequence[str]) -> "SparsePoly":
        variables = tuple(variables)
        index = {v: i for i, v in enumerate(variables)}
        terms: Dict[Exps, int] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            coeff, *powers = line.split()
            e = [0] * len(variables)
            for item in powers:
                name, _, k = item.partition(":")
                if name not in index or not k.isdigit():
                    raise ValueError(f"line {lineno}: bad factor {item!r}")
                e[index[name]] = int(k)
            key = tuple(e)
            if key in terms:
                raise ValueError(f"line {lineno}: repeated monomial")
            terms[key] = int(coeff)
        return cls(variables, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        fmt = getattr(self.ring, "format", str)
        out = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            if isinstance(c, int):
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else str(mag))
                out.append((sign, body))
            else:
                body = fmt(c) + (f"*{mono}" if mono else "")
                out.append(("+", body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"SparsePoly({self})"


def poly_exact_div_by_int(f: SparsePoly, c: int) -> SparsePoly:
    """Divide every coefficient of ``f`` by the integer ``c``; raise if inexact."""
    if c == 0:
        raise ZeroDivisionError("division by zero")
    out = {}
    for e, a in f.terms.items():
        q, r = divmod(a, c)
        if r:
            raise NotDivisible((e, a), c)
        out[e] = q
    g = SparsePoly(f.variables, out, f.ring)
    return g


def variables_xy(n: int, binary: bool = True) -> Tuple[str, ...]:
    xs = tuple(f"x{i}" for i in range(n + 1))
    return xs + tuple(f"y{i}" for i in range(n + 1)) if binary else xs


class PolyRing:
    """``ZZ[variables]`` in the ring vocabulary, so Witt vectors can live over it."""

    finite = False

    def __init__(self, variables: Sequence[str]):
        self.variables = tuple(variables)
        self.zero = SparsePoly.zero(self.variables)
        self.one = SparsePoly.const(1, self.variables)

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
        return SparsePoly.const(int(n), self.variables)

    def is_zero(self, a):
        return a.is_zero()

    def eq(self, a, b):
        return a == b

    def is_unit(self, a):
        return a.degree() == 0 and a.constant_term() in (1, -1)

    def format(self, a):
        return str(a)

    def __repr__(self):
        return f"PolyRing({list(self.variables)})"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.variables == self.variables

    def __hash__(self):
        return hash(("PolyRing", self.variables))
