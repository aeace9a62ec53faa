"""Presented rings, their delta-prolongations, and truncated jet rings.

``J^n(A)`` for ``A = Z[t_1..t_r]/(f_1..f_s)`` is presented by generators
``t_i^(j)`` (``0 <= j <= n``) and relations ``delta^j(f)``, where delta is
computed on the free cover ``Z[t^(j)]`` by ``delta(g) = (phi(g) - g^p)/p``
with ``phi(t^(m)) = (t^(m))^p + p t^(m+1)``.  Its points in a ring ``C`` are
the points of ``A`` in ``W_n(C)``; ``adjunction_check`` compares the counts.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from . import calculus, kernels
from .substrate.poly import PolyRing, SparsePoly, poly_exact_div_by_int
from .substrate.rings import ZZ, GaloisRing, Ring, Zmod
from .witt import WittRing

DEFAULT_BOUND = 10 ** 6


class ParseError(SyntaxError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.text = text
        self.position = position


class DuplicateGenerator(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class RingPresentation:
    generators: Tuple[str, ...]
    relations: Tuple[SparsePoly, ...] = ()
    modulus: int | None = None  # base ring Z/m when set, else Z

    def to_text(self) -> str:
        base = "Z" if self.modulus is None else f"Z/{self.modulus}"
        head = f"{base}[{','.join(self.generators)}]"
        if not self.relations:
            return head
        return head + "/(" + ", ".join(str(r) for r in self.relations) + ")"

    __str__ = to_text


@dataclass(frozen=True)
class JetPresentation:
    p: int
    n: int
    source: RingPresentation
    generators: Tuple[str, ...]
    relations: Tuple[SparsePoly, ...]
    jet_names: Dict[str, Tuple[str, ...]] = field(default_factory=dict, compare=False, hash=False)

    def as_presentation(self) -> RingPresentation:
        return RingPresentation(self.generators, self.relations)

    def to_text(self) -> str:
        return self.as_presentation().to_text()


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            start = m.start(m.lastindex) if m.lastindex else m.end()
            if m.group(1):
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2):
                self.tokens.append(("name", m.group(2), start))
            elif m.group(3):
                self.tokens.append(("op", m.group(3), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0
        self.variables: Tuple[str, ...] = ()

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def expect(self, kind: str, value: str | None = None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] if tok[0] != "end" else "end of input"
            self.fail(f"expected {want!r}, found {got!r}")
        return self.take()

    def presentation(self) -> RingPresentation:
        self.expect("name", "Z")
        modulus = None
        if self.peek() == ("op", "/", self.peek()[2]):
            self.take()
            tok = self.expect("int")
            modulus = int(tok[1])
            if modulus < 2:
                self.fail("modulus must be at least 2", tok)
        self.expect("op", "[")
        gens: List[str] = []
        if not (self.peek()[0] == "op" and self.peek()[1] == "]"):
            while True:
                tok = self.expect("name")
                if tok[1] in gens:
                    raise DuplicateGenerator(f"generator {tok[1]!r} repeated at position {tok[2]}")
                gens.append(tok[1])
                if self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    continue
                break
        self.expect("op", "]")
        self.variables = tuple(gens)
        relations: List[SparsePoly] = []
        if self.peek()[0] == "op" and self.peek()[1] == "/":
            self.take()
            self.expect("op", "(")
            while True:
                start = self.peek()
                rel = self.poly()
                if rel.is_zero():
                    self.fail("relation is zero", start)
                relations.append(rel)
                if self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    continue
                break
            self.expect("op", ")")
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        if modulus is not None:
            relations = [_reduce_coeffs(r, modulus) for r in relations]
        return RingPresentation(tuple(gens), tuple(relations), modulus)

    def poly(self) -> SparsePoly:
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> SparsePoly:
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                acc = acc * self.factor()
            elif tok[0] in ("int", "name") or (tok[0] == "op" and tok[1] == "("):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> SparsePoly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.expect("int")
            base = base ** int(tok[1])
        return base

    def atom(self) -> SparsePoly:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return SparsePoly.const(int(tok[1]), self.variables)
        if tok[0] == "name":
            self.take()
            if tok[1] not in self.variables:
                self.fail(f"unknown generator {tok[1]!r}", tok)
            return SparsePoly.var(tok[1], self.variables)
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            inner = self.poly()
            self.expect("op", ")")
            return inner
        got = tok[1] if tok[0] != "end" else "end of input"
        self.fail(f"expected a term, found {got!r}")


def _reduce_coeffs(f: SparsePoly, m: int) -> SparsePoly:
    return SparsePoly(f.variables, {e: c % m for e, c in f.terms.items()})


def parse_presentation(text: str) -> RingPresentation:
    """Parse ``Z[g1,...,gr]/(f1, ..., fs)`` (or ``Z/m[...]``)."""
    return _Parser(text).presentation()


def parse_polynomial(text: str, generators: Sequence[str]) -> SparsePoly:
    """Parse one integer polynomial in ``generators`` with the relation grammar."""
    parser = _Parser(text)
    parser.variables = tuple(generators)
    f = parser.poly()
    if parser.peek()[0] != "end":
        parser.fail(f"unexpected {parser.peek()[1]!r}")
    return f


# -- prolongation ---------------------------------------------------------------

def jet_name(gen: str, j: int) -> str:
    return f"{gen}_{j}" if gen[-1].isdigit() else f"{gen}{j}"


def jet_variables(generators: Sequence[str], n: int) -> Tuple[str, ...]:
    names = tuple(jet_name(g, j) for g in generators for j in range(n + 1))
    if len(set(names)) != len(names):
        raise DuplicateGenerator(f"jet variable names collide: {names}")
    return names


def _lift_to_jets(f: SparsePoly, n: int) -> SparsePoly:
    """``f(t) -> f(t^(0))`` inside the jet variables of order ``n``."""
    variables = jet_variables(f.variables, n)
    mapping = {g: jet_name(g, 0) for g in f.variables}
    return f.rename(mapping).embed(variables)


def _phi_images(generators: Sequence[str], p: int, n: int) -> List[SparsePoly]:
    """phi on jet variables of order ``n`` (``t^(n)`` maps into order ``n + 1``)."""
    src = jet_variables(generators, n)
    dst = jet_variables(generators, n + 1)
    images = []
    for g in generators:
        for j in range(n + 1):
            here = SparsePoly.var(jet_name(g, j), dst)
            nxt = SparsePoly.var(jet_name(g, j + 1), dst)
            images.append(here ** p + p * nxt)
    return images


def delta_on_jets(g: SparsePoly, generators: Sequence[str], p: int, order: int) -> SparsePoly:
    """One application of delta to a polynomial in jet variables of ``order``."""
    images = _phi_images(generators, p, order)
    target = jet_variables(generators, order + 1)
    lifted = g.embed(target)
    return poly_exact_div_by_int(g.compose(images) - lifted ** p, p)


def prolong(f: SparsePoly, p: int, j: int) -> SparsePoly:
    """``delta^j(f)`` in the jet variables of order ``j``."""
    if j < 0:
        raise ValueError("order must be non-negative")
    gens = f.variables
    g = _lift_to_jets(f, 0)
    for m in range(j):
        g = delta_on_jets(g, gens, p, m)
    return g


def prolong_all(f: SparsePoly, p: int, n: int) -> List[SparsePoly]:
    """``[f, delta f, ..., delta^n f]``, each embedded in the order-``n`` variables."""
    gens = f.variables
    target = jet_variables(gens, n)
    g = _lift_to_jets(f, 0)
    out = [g.embed(target)]
    for m in range(n):
        g = delta_on_jets(g, gens, p, m)
        out.append(g.embed(target))
    return out


def prolong_via_witt(f: SparsePoly, p: int, n: int) -> List[SparsePoly]:
    """Cross-check: evaluate ``f`` on ``(t^(0),...,t^(n))`` in ``W_n(Z[jets])`` with the laws."""
    gens = f.variables
    target = jet_variables(gens, n)
    ring = PolyRing(target)
    W = WittRing(ring, p, n)
    values = [tuple(SparsePoly.var(jet_name(g, j), target) for j in range(n + 1)) for g in gens]
    return list(f.evaluate(values, W))


def jet_presentation(A: RingPresentation, p: int, n: int) -> JetPresentation:
    if A.modulus is not None:
        raise ValueError("jet presentations need base ring Z")
    gens = jet_variables(A.generators, n)
    rels: List[SparsePoly] = []
    for f in A.relations:
        rels.extend(prolong_all(f, p, n))
    names = {g: tuple(jet_name(g, j) for j in range(n + 1)) for g in A.generators}
    return JetPresentation(p, n, A, gens, tuple(rels), names)


def corrupt_relation(J: JetPresentation, index: int = -1, shift: int = 1) -> JetPresentation:
    """Negative control: add ``shift`` to the constant term of one relation."""
    rels = list(J.relations)
    if not rels:
        raise ValueError("no relation to corrupt")
    rels[index] = rels[index] + shift
    return JetPresentation(J.p, J.n, J.source, J.generators, tuple(rels), J.jet_names)


# -- points -----------------------------------------------------------------------

def _check_size(size: int, r: int, bound: int) -> None:
    total = size ** r
    if total > bound:
        raise TooLarge(f"{size}^{r} = {total} assignments exceed the bound {bound}")


def enumerate_points(A, C: Ring, bound: int = DEFAULT_BOUND) -> List[tuple]:
    """All generator assignments in ``C`` satisfying the relations, in product order."""
    pres = A.as_presentation() if isinstance(A, JetPresentation) else A
    r = len(pres.generators)
    _check_size(C.size, r, bound)
    elems = list(C.elements())
    if isinstance(C, Zmod):
        npts = C.m ** r
        cols = [[elems[(i // C.m ** (r - 1 - v)) % C.m] for i in range(npts)] for v in range(r)]
        alive = [True] * npts
        for rel in pres.relations:
            vals = kernels.eval_batch(rel.terms, r, cols, C.m)
            for i, v in enumerate(vals):
                if v:
                    alive[i] = False
        return [tuple(cols[v][i] for v in range(r)) for i in range(npts) if alive[i]]
    out = []
    for point in itertools.product(elems, repeat=r):
        if all(C.is_zero(rel.evaluate(point, C)) for rel in pres.relations):
            out.append(point)
    return out


def _witt_points(A: RingPresentation, p: int, n: int, C: Ring, bound: int) -> int:
    """Count points of ``A`` in ``W_n(C)`` by evaluating relations with Witt arithmetic."""
    W = WittRing(C, p, n)
    r = len(A.generators)
    _check_size(C.size, r * (n + 1), bound)
    if not A.relations:
        return W.size ** r
    if isinstance(C, Zmod):
        return _witt_points_batch(A, W, bound)
    count = 0
    elems = list(W.elements())
    for point in itertools.product(elems, repeat=r):
        if all(W.is_zero(rel.evaluate(point, W)) for rel in A.relations):
            count += 1
    return count


def _witt_points_batch(A: RingPresentation, W: WittRing, bound: int) -> int:
    """Vectorised version over ``Z/m`` using the batch law kernels."""
    C = W.base
    r = len(A.generators)
    elems = list(W.elements())
    npts = len(elems) ** r
    idx = range(npts)
    columns = []  # columns[v] = list of Witt vectors for generator v
    for v in range(r):
        stride = len(elems) ** (r - 1 - v)
        columns.append([elems[(i // stride) % len(elems)] for i in idx])
    alive = [True] * npts
    for rel in A.relations:
        total = None
        for e, c in rel.sorted_terms():
            const = W.from_int(c)
            term = [const] * npts
            for v, k in enumerate(e):
                for _ in range(k):
                    term = W.batch("Product", term, columns[v])
            total = term if total is None else W.batch("Sum", total, term)
        for i, vec in enumerate(total):
            if any(vec):
                alive[i] = False
    return sum(alive)


@dataclass
class AdjunctionReport:
    count_jet: int
    count_witt: int

    @property
    def passed(self) -> bool:
        return self.count_jet == self.count_witt


def adjunction_check(A: RingPresentation, p: int, n: int, C: Ring, bound: int = DEFAULT_BOUND,
                     jets: JetPresentation | None = None) -> AdjunctionReport:
    """Compare ``|J^n(A)(C)|`` with ``|A(W_n(C))|``; pass ``jets`` to test a tampered presentation."""
    J = jets if jets is not None else jet_presentation(A, p, n)
    count_jet = len(enumerate_points(J, C, bound))
    count_witt = _witt_points(A, p, n, C, bound)
    return AdjunctionReport(count_jet, count_witt)


def coghost_eval(point: Sequence, A: RingPresentation, p: int, n: int, C: Ring) -> List[tuple]:
    """Ghost components of the ``W_n(C)``-point behind a jet point, one A-point per level."""
    r = len(A.generators)
    if len(point) != r * (n + 1):
        raise ValueError(f"expected {r * (n + 1)} jet coordinates")
    W = WittRing(C, p, n)
    vectors = [tuple(point[i * (n + 1) : (i + 1) * (n + 1)]) for i in range(r)]
    ghosts = [W.ghost_map(v) for v in vectors]
    return [tuple(g[m] for g in ghosts) for m in range(n + 1)]


def ring_from_name(name: str, p: int | None = None) -> Ring:
    """``f2``/``F5``, ``z4``/``Z/9``, ``zz``/``Z``, ``gf4`` (Galois field of prime power order)."""
    key = name.strip().lower().replace(" ", "")
    if key in ("z", "zz"):
        return ZZ
    m = re.fullmatch(r"(?:f|gf)(\d+)", key)
    if m:
        q = int(m.group(1))
        from .substrate.rings import factor_prime_power

        pk = factor_prime_power(q)
        if pk is None:
            raise ValueError(f"{q} is not a prime power")
        return Zmod(q) if pk[1] == 1 else GaloisRing(pk[0], 1, degree=pk[1])
    m = re.fullmatch(r"z/?(\d+)", key)
    if m:
        return Zmod(int(m.group(1)))
    m = re.fullmatch(r"gr\((\d+),(\d+),(\d+)\)", key)
    if m:
        return GaloisRing(int(m.group(1)), int(m.group(2)), degree=int(m.group(3)))
    raise ValueError(f"unknown ring {name!r}")
