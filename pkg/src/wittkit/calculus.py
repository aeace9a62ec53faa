"""Universal polynomials for Witt vectors in Buium-Joyal coordinates.

A Witt vector ``(x_0, x_1, ...)`` in these coordinates has ghost components
``Z_m(x)`` with ``Z_0 = x_0`` and ``Z_{m+1}(x_0..x_{m+1}) = Z_m(x_0..x_m)^p +
p Z_m(x_1..x_{m+1})``; the coordinates are ``x, delta x, delta^2 x, ...``.
Every law here is found by ghost matching over the integers:

* ``shift`` (default): given target ghost components ``T_0..T_n``, the
  coordinate ``x_s`` is the zeroth ghost component after ``s`` applications
  of ``T -> ((T_{j+1} - T_j^p) / p)_j``;
* ``levelwise``: ``x_m = (T_m - Z_m(x_0..x_{m-1}, 0)) / p^m``, using that
  ``x_m`` enters ``Z_m`` linearly with coefficient ``p^m``.

Both routes finish with exact division, so a remainder would expose a bug.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from filelock import FileLock

from . import kernels
from .substrate.poly import SparsePoly, poly_exact_div_by_int

KINDS = ("Sum", "Product", "Negation", "Ghost", "WittGhost", "BJfromWitt", "WittFromBJ")
BINARY = ("Sum", "Product")
MAX_P = 7
MAX_N = 5


class CeilingExceeded(ValueError):
    pass


class CacheMiss(KeyError):
    pass


class FormatError(ValueError):
    pass


class KeyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class UniversalPolynomial:
    p: int
    n: int
    kind: str
    body: SparsePoly

    def weight_check(self) -> bool:
        """Isobaric check under ``wt(x_i) = wt(y_i) = p^i``.

        Sum, Negation and the ghost families have total weight ``p^n``; the
        product law is bi-isobaric (weight ``p^n`` in x and in y separately).
        """
        m = self.n + 1
        target = self.p ** self.n
        if self.kind == "Product":
            wx = [self.p ** i for i in range(m)] + [0] * m
            wy = [0] * m + [self.p ** i for i in range(m)]
            return self.body.weights(wx) <= {target} and self.body.weights(wy) <= {target}
        w = [self.p ** (i % m) for i in range(self.body.nvars)]
        return self.body.weights(w) <= {target}


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def check_ceiling(p: int, n: int) -> None:
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n < 0:
        raise ValueError("level must be non-negative")
    if p > MAX_P or n > MAX_N:
        raise CeilingExceeded(f"(p={p}, n={n}) is beyond the supported range p <= {MAX_P}, n <= {MAX_N}")


def xvars(n: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(n + 1))


def xyvars(n: int) -> Tuple[str, ...]:
    return xvars(n) + tuple(f"y{i}" for i in range(n + 1))


def variables_for(kind: str, n: int) -> Tuple[str, ...]:
    return xyvars(n) if kind in BINARY else xvars(n)


# -- ghost families ---------------------------------------------------

def _shift_exps(f: SparsePoly, nv: int) -> SparsePoly:
    """Rename x_i -> x_{i+1} inside a polynomial on ``nv`` variables (last one unused)."""
    out = {(0,) + e[:-1]: c for e, c in f.terms.items()}
    return SparsePoly(f.variables, out)


@lru_cache(maxsize=None)
def _ghost_bodies(p: int, n: int) -> Tuple[SparsePoly, ...]:
    v = xvars(n)
    z = [SparsePoly.var("x0", v)]
    for m in range(n):
        z.append(z[m] ** p + p * _shift_exps(z[m], n + 1))
    return tuple(z)


def generate_ghost(p: int, n: int) -> List[UniversalPolynomial]:
    """``Z_0..Z_n``; level ``m`` lives in ``x0..xm``."""
    check_ceiling(p, n)
    return [
        UniversalPolynomial(p, m, "Ghost", z.embed(xvars(m)))
        for m, z in enumerate(_ghost_bodies(p, n))
    ]


@lru_cache(maxsize=None)
def _witt_ghost_bodies(p: int, n: int) -> Tuple[SparsePoly, ...]:
    v = xvars(n)
    xs = SparsePoly.gens(v)
    out = []
    for m in range(n + 1):
        acc = SparsePoly.zero(v)
        for i in range(m + 1):
            acc = acc + (p ** i) * xs[i] ** (p ** (m - i))
        out.append(acc)
    return tuple(out)


def generate_witt_ghost(p: int, n: int) -> List[UniversalPolynomial]:
    """Classical ghost components ``w_m = sum_i p^i x_i^(p^(m-i))``."""
    check_ceiling(p, n)
    return [
        UniversalPolynomial(p, m, "WittGhost", w.embed(xvars(m)))
        for m, w in enumerate(_witt_ghost_bodies(p, n))
    ]


def _ghost_in(p: int, m: int, variables: Sequence[str], names: Sequence[str]) -> SparsePoly:
    """``Z_m`` evaluated on the variables ``names`` inside the list ``variables``."""
    z = _ghost_bodies(p, m)[m]
    return z.rename({f"x{i}": names[i] for i in range(m + 1)}).embed(variables)


# -- solvers ------------------------------------------------------------

def _solve_shift(p: int, targets: List[SparsePoly]) -> List[SparsePoly]:
    level = list(targets)
    coords = [level[0]]
    for _ in range(1, len(targets)):
        level = [
            poly_exact_div_by_int(level[j + 1] - level[j] ** p, p)
            for j in range(len(level) - 1)
        ]
        coords.append(level[0])
    return coords


def _solve_levelwise(p: int, targets: List[SparsePoly]) -> List[SparsePoly]:
    variables = targets[0].variables
    coords: List[SparsePoly] = []
    for m, t in enumerate(targets):
        if m == 0:
            coords.append(t)
            continue
        z = _ghost_bodies(p, m)[m]
        known = z.compose(coords + [SparsePoly.zero(variables)])
        coords.append(poly_exact_div_by_int(t - known, p ** m))
    return coords


def _solve(p: int, targets: List[SparsePoly], method: str) -> List[SparsePoly]:
    if method == "shift":
        return _solve_shift(p, targets)
    if method == "levelwise":
        return _solve_levelwise(p, targets)
    raise ValueError(f"unknown method {method!r}")


def _law_targets(p: int, n: int, kind: str) -> List[SparsePoly]:
    v = variables_for(kind, n)
    xs = xvars(n)
    ys = tuple(f"y{i}" for i in range(n + 1))
    out = []
    for m in range(n + 1):
        zx = _ghost_in(p, m, v, xs)
        if kind == "Sum":
            out.append(zx + _ghost_in(p, m, v, ys))
        elif kind == "Product":
            out.append(zx * _ghost_in(p, m, v, ys))
        elif kind == "Negation":
            out.append(-zx)
        else:
            raise ValueError(f"{kind} is not a law kind")
    return out


def _restrict(p: int, kind: str, bodies: List[SparsePoly]) -> List[UniversalPolynomial]:
    return [
        UniversalPolynomial(p, m, kind, b.embed(variables_for(kind, m)))
        for m, b in enumerate(bodies)
    ]


@lru_cache(maxsize=None)
def _law(p: int, n: int, kind: str, method: str) -> Tuple[UniversalPolynomial, ...]:
    return tuple(_restrict(p, kind, _solve(p, _law_targets(p, n, kind), method)))


def generate_law(p: int, n: int, kind: str, method: str = "shift") -> List[UniversalPolynomial]:
    """Levels ``0..n`` of the Sum, Product or Negation law."""
    check_ceiling(p, n)
    if kind not in ("Sum", "Product", "Negation"):
        raise ValueError(f"{kind} is not a law kind")
    # the shift route for level n yields every lower level too
    return list(_law(p, n, kind, method))


def _witt_from_bj(p: int, targets: List[SparsePoly]) -> List[SparsePoly]:
    """Classical coordinates from classical ghost targets (peel ``c_0^(p^j)`` each step)."""
    level = list(targets)
    coords = [level[0]]
    for _ in range(1, len(targets)):
        c0 = level[0]
        powers = [c0]
        for _ in range(len(level) - 1):
            powers.append(powers[-1] ** p)
        level = [poly_exact_div_by_int(level[j + 1] - powers[j + 1], p) for j in range(len(level) - 1)]
        coords.append(level[0])
    return coords


@lru_cache(maxsize=None)
def _conversion(p: int, n: int, direction: str) -> Tuple[UniversalPolynomial, ...]:
    if direction == "BJfromWitt":
        targets = [w for w in _witt_ghost_bodies(p, n)]
        bodies = _solve_shift(p, targets)
    elif direction == "WittFromBJ":
        bodies = _witt_from_bj(p, list(_ghost_bodies(p, n)))
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return tuple(_restrict(p, direction, bodies))


def generate_conversion(p: int, n: int, direction: str) -> List[UniversalPolynomial]:
    check_ceiling(p, n)
    return list(_conversion(p, n, direction))


def generate(p: int, n: int, kind: str) -> List[UniversalPolynomial]:
    """Dispatch on ``kind``; returns levels ``0..n``."""
    if kind == "Ghost":
        return generate_ghost(p, n)
    if kind == "WittGhost":
        return generate_witt_ghost(p, n)
    if kind in ("BJfromWitt", "WittFromBJ"):
        return generate_conversion(p, n, kind)
    return generate_law(p, n, kind)


# -- independent checks ----------------------------------------------------

def ghost_defect(p: int, n: int, kind: str) -> SparsePoly:
    """``Z_n(law) - target`` expanded over the integers; zero when the law is right."""
    outer, subs, rhs = _identity_sides(p, n, kind)
    return outer.compose(subs) - rhs


def _identity_sides(p: int, n: int, kind: str, laws: Sequence[UniversalPolynomial] | None = None):
    if laws is None:
        laws = generate(p, n, kind)
    variables = laws[n].body.variables
    subs = [u.body.embed(variables) for u in laws]
    if kind in ("Sum", "Product", "Negation", "BJfromWitt"):
        outer = _ghost_bodies(p, n)[n]
    elif kind == "WittFromBJ":
        outer = _witt_ghost_bodies(p, n)[n]
    else:
        raise ValueError(f"no ghost identity for {kind}")
    if kind == "BJfromWitt":
        rhs = _witt_ghost_bodies(p, n)[n]
    elif kind == "WittFromBJ":
        rhs = _ghost_bodies(p, n)[n]
    else:
        rhs = _law_targets(p, n, kind)[n]
    return outer, subs, rhs.embed(variables)


def verify_ghost_identity(p: int, n: int, kind: str, laws: Sequence[UniversalPolynomial] | None = None) -> bool:
    """Check the level-``n`` ghost identity exactly, modulo a covering set of word primes.

    ``laws`` (levels ``0..n``) defaults to freshly generated ones; pass cached
    polynomials to audit a cache.
    """
    outer, subs, rhs = _identity_sides(p, n, kind, laws)
    return kernels.compose_equals(outer.terms, [s.terms for s in subs], rhs.nvars, rhs.terms)


# -- cache ---------------------------------------------------------------

HEADER = "WITTPOLY v1 p={p} n={n} kind={kind}"


def default_cache_dir(explicit: str | os.PathLike | None = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get("WITT_CACHE")
    return Path(env) if env else Path(".wittcache")


def serialize(u: UniversalPolynomial) -> str:
    body = u.body.to_text()
    lines = [HEADER.format(p=u.p, n=u.n, kind=u.kind)]
    if body:
        lines.append(body)
    lines.append(f"END {len(u.body)}")
    return "\n".join(lines) + "\n"


def parse(text: str, p: int | None = None, n: int | None = None, kind: str | None = None) -> UniversalPolynomial:
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty cache file")
    head = lines[0].split()
    if len(head) != 5 or head[:2] != ["WITTPOLY", "v1"]:
        raise FormatError(f"bad header {lines[0]!r}")
    try:
        fields = dict(item.split("=", 1) for item in head[2:])
        fp, fn, fkind = int(fields["p"]), int(fields["n"]), fields["kind"]
    except (KeyError, ValueError):
        raise FormatError(f"bad header {lines[0]!r}") from None
    if fkind not in KINDS:
        raise FormatError(f"unknown kind {fkind!r}")
    if (p is not None and p != fp) or (n is not None and n != fn) or (kind is not None and kind != fkind):
        raise KeyMismatch(f"file holds p={fp} n={fn} kind={fkind}, requested p={p} n={n} kind={kind}")
    if len(lines) < 2 or not lines[-1].startswith("END "):
        raise FormatError("missing END trailer (truncated file?)")
    try:
        count = int(lines[-1].split()[1])
    except (IndexError, ValueError):
        raise FormatError(f"bad trailer {lines[-1]!r}") from None
    body_lines = lines[1:-1]
    if len(body_lines) != count:
        raise FormatError(f"trailer promises {count} terms, found {len(body_lines)}")
    try:
        body = SparsePoly.from_text("\n".join(body_lines), variables_for(fkind, fn))
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    u = UniversalPolynomial(fp, fn, fkind, body)
    if serialize(u) != text:
        raise FormatError("terms are not in canonical order")
    return u


class PolyCache:
    """Directory of ``<kind>_p<p>_n<n>.wpoly`` files; one writer at a time, readers lock-free."""

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = default_cache_dir(directory)

    def path(self, p: int, n: int, kind: str) -> Path:
        return self.directory / f"{kind}_p{p}_n{n}.wpoly"

    def _lock(self) -> FileLock:
        self.directory.mkdir(parents=True, exist_ok=True)
        return FileLock(str(self.directory / ".lock"))

    def store(self, u: UniversalPolynomial) -> Path:
        target = self.path(u.p, u.n, u.kind)
        text = serialize(u)
        with self._lock():
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-")
            try:
                with os.fdopen(fd, "w") as fh:
                    fh.write(text)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return target

    def load(self, p: int, n: int, kind: str) -> UniversalPolynomial:
        target = self.path(p, n, kind)
        if not target.exists():
            raise CacheMiss((p, n, kind))
        try:
            return parse(target.read_text(), p, n, kind)
        except FormatError as exc:
            raise FormatError(f"{target.name} (p={p}, n={n}, kind={kind}): {exc}") from None

    def load_file(self, path: str | os.PathLike, p: int, n: int, kind: str) -> UniversalPolynomial:
        return parse(Path(path).read_text(), p, n, kind)

    def get(self, p: int, n: int, kind: str) -> List[UniversalPolynomial]:
        """Levels ``0..n``, reading cached levels and generating the rest."""
        out = []
        missing = False
        for m in range(n + 1):
            try:
                out.append(self.load(p, m, kind))
            except CacheMiss:
                missing = True
                break
        if missing:
            out = generate(p, n, kind)
            for u in out:
                self.store(u)
        return out
