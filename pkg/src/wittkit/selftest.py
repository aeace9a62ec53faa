"""Built-in invariant batteries behind ``wittkit selftest``.

The report is deterministic: it never mentions timings or whether a law
came from the cache, so two runs over the same data produce the same text.
"""

from __future__ import annotations

import itertools
import random
from typing import Callable, List, Tuple

from . import calculus, canonical, delta, jets, witt
from .substrate.rings import GF, ZZ, Zmod

Check = Tuple[str, Callable[[], Tuple[bool, str]]]

LAW_KINDS = ("Sum", "Product", "Negation", "BJfromWitt", "WittFromBJ")


def _law_check(cache: calculus.PolyCache, p: int, n: int, kind: str):
    def run():
        try:
            laws = cache.get(p, n, kind)
        except calculus.FormatError as exc:
            return False, f"unreadable cache entry {exc}"
        except calculus.KeyMismatch as exc:
            return False, f"cache entry for (p={p}, n<={n}, kind={kind}) has the wrong key: {exc}"
        for m in range(n + 1):
            if not calculus.verify_ghost_identity(p, m, kind, laws[: m + 1]):
                return False, f"ghost identity fails for (p={p}, n={m}, kind={kind})"
        return True, f"levels 0..{n}"

    return run


def _iso_check(p: int, n: int):
    def run():
        W = witt.WittRing(Zmod(p), p, n)
        table = witt.integer_isomorphism(p, n)
        q = p ** (n + 1)
        if len(set(table.values())) != q:
            return False, "map Z/p^(n+1) -> W_n(F_p) is not injective"
        for i, j in itertools.product(range(q), repeat=2):
            if W.add(table[i], table[j]) != table[(i + j) % q]:
                return False, f"addition fails at ({i}, {j})"
            if W.mul(table[i], table[j]) != table[(i * j) % q]:
                return False, f"multiplication fails at ({i}, {j})"
        e = witt.p_nilpotency_degree(Zmod(p), p, n)
        if e != n + 1:
            return False, f"p-nilpotency degree {e}, expected {n + 1}"
        return True, f"{q * q} pairs"

    return run


def _coplethysm_check():
    W2 = witt.WittRing(Zmod(2), 2, 2)
    target = W2.coplethysm_target(1, 1)
    image = {W2.coplethysm(a, 1, 1) for a in W2.elements()}
    for a, b in itertools.product(list(W2.elements()), repeat=2):
        for op in ("add", "mul"):
            lhs = W2.coplethysm(getattr(W2, op)(a, b), 1, 1)
            rhs = getattr(target, op)(W2.coplethysm(a, 1, 1), W2.coplethysm(b, 1, 1))
            if lhs != rhs:
                return False, f"coplethysm is not additive/multiplicative at {a}, {b}"
    for z in target.elements():
        verdict = W2.equalizer_check(z, 1, 1)
        if isinstance(verdict, witt.InImage) != (z in image):
            return False, f"equalizer verdict wrong at {z}"
    return True, "64 pairs, 16 equalizer verdicts"


def _retraction_check(p: int):
    def run():
        rng = random.Random(p)
        for trial in range(100):
            n = 1 + trial % 2
            W = witt.WittRing(ZZ, p, n + 1)
            nested = W.coplethysm_target(1, n)
            x = tuple(rng.randint(-20, 20) for _ in range(n + 2))
            g = witt.ghost_retraction(witt.ghost_of_nested(nested, W.coplethysm(x, 1, n)))
            if g != W.ghost_map(x):
                return False, f"retraction of the nested ghost differs from the ghost at {x}"
        return True, "100 random vectors"

    return run


def _delta_check(p: int, levels: int):
    def run():
        report = delta.validate_delta(delta.DeltaTower.fermat(p, levels))
        if not report.passed:
            return False, report.failures[0].describe(delta.DeltaTower.fermat(p, levels))
        return True, f"{report.checked} checks"

    return run


def _hopf_check(p: int, exps: Tuple[int, ...], k: int):
    def run():
        rep = delta.hopf_delta_solve(p, exps, k)
        zero = tuple(tuple(0 for _ in rep.basis) for _ in exps)
        if rep.solutions != [zero]:
            return False, f"{len(rep.solutions)} solutions"
        if not rep.stable:
            return False, "solution set changes from k to k+1"
        return True, "only the zero solution"

    return run


JET_QUICK = (
    ("Z[t]/(t^2-1)", 2, 1, "f2"),
    ("Z[t]/(t^2-t)", 2, 1, "f2"),
    ("Z[t]/(t^2+1)", 3, 1, "f3"),
    ("Z[x,y]/(x*y-1)", 2, 1, "f2"),
)

JET_FULL = JET_QUICK + (
    ("Z[t]/(t^2-1)", 2, 2, "f2"),
    ("Z[t]/(t^3-t)", 3, 1, "f3"),
    ("Z[t]", 2, 1, "f4"),
    ("Z[x,y]/(y^2-x^3-1)", 3, 1, "f3"),
    ("Z[t]/(t^2-2)", 3, 1, "f3"),
    ("Z[t]/(t^2)", 2, 1, "z4"),
    ("Z[t]/(2*t)", 2, 1, "f2"),
    ("Z[x,y]/(x^2+y^2-1)", 5, 1, "f5"),
)


def _jet_check(text: str, p: int, n: int, over: str):
    def run():
        A = jets.parse_presentation(text)
        rep = jets.adjunction_check(A, p, n, jets.ring_from_name(over, p))
        if not rep.passed:
            return False, f"{rep.count_jet} jet points vs {rep.count_witt} Witt points"
        return True, f"{rep.count_jet} points"

    return run


def _jet_negative():
    A = jets.parse_presentation("Z[t]/(t^2-1)")
    J = jets.corrupt_relation(jets.jet_presentation(A, 2, 1))
    rep = jets.adjunction_check(A, 2, 1, Zmod(2), jets=J)
    if rep.passed:
        return False, "corrupted jet relation went unnoticed"
    return True, f"{rep.count_jet} != {rep.count_witt}"


LIFT_CURVES = ((5, 1, 1, 4), (7, 1, 1, 3), (11, 1, 5, 3), (13, 2, 9, 3))


def _lift_check(p: int, a: int, b: int, k: int, table):
    def run():
        E0 = canonical.EllipticCurve(GF(p), a, b)
        res = canonical.canonical_lift_j(E0, k)
        expect = canonical.cm_oracle_j(E0, k, table)
        if res.j != expect:
            return False, f"lift {res.j} != oracle {expect} mod {p}^{k}"
        again, _ = canonical.frobenius_step(res.curve, k)
        if again != res.j:
            return False, "an extra quotient step moves j"
        return True, f"j = {res.j} (mod {p ** k})"

    return run


def _vp_check(p: int, a: int, b: int, k: int):
    def run():
        rep = canonical.verify_vp_factorization(canonical.EllipticCurve(GF(p), a, b), k)
        if not rep.passed:
            return False, f"F: {rep.j_after_frobenius}, V: {rep.j_after_verschiebung}, canonical {rep.j_canonical}"
        return True, f"both halves fix j = {rep.j_canonical}"

    return run


def checks(level: str, cache: calculus.PolyCache, cm_table=None) -> List[Check]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown selftest level {level!r}")
    full = level == "full"
    out: List[Check] = []
    laws = [(2, 3), (3, 2)] if not full else [(2, 4), (3, 4), (5, 3)]
    for p, n in laws:
        for kind in LAW_KINDS:
            out.append((f"law {kind} p={p} n<={n}", _law_check(cache, p, n, kind)))
    isos = [(2, 1), (2, 2), (3, 1)] + ([(3, 2), (5, 1)] if full else [])
    for p, n in isos:
        out.append((f"W_{n}(F_{p}) = Z/{p ** (n + 1)}", _iso_check(p, n)))
    out.append(("coplethysm and equalizer over F_2", _coplethysm_check))
    for p in (2, 3):
        out.append((f"ghost retraction p={p}", _retraction_check(p)))
    for p in (2, 3):
        for lv in (2, 3):
            out.append((f"fermat tower p={p} levels={lv}", _delta_check(p, lv)))
    hopf = [(2, (1,), 3), (3, (1,), 2)] + ([(2, (2,), 3)] if full else [])
    for p, e, k in hopf:
        out.append((f"mu uniqueness p={p} exps={list(e)} k={k}", _hopf_check(p, e, k)))
    for text, p, n, over in (JET_FULL if full else JET_QUICK):
        out.append((f"jet adjunction {text} p={p} n={n} over {over}", _jet_check(text, p, n, over)))
    out.append(("jet adjunction negative control", _jet_negative))
    if full:
        table = cm_table if cm_table is not None else canonical.load_cm_table()
        for p, a, b, k in LIFT_CURVES:
            out.append((f"canonical lift p={p} a={a} b={b} k={k}", _lift_check(p, a, b, k, table)))
        out.append(("v o f fixes the canonical curve p=5 k=3", _vp_check(5, 1, 1, 3)))
    return out


def run(level: str, cache: calculus.PolyCache, emit: Callable[[str], None], cm_table=None) -> int:
    """Run the battery, emitting one line per check; returns the number of failures."""
    failed = 0
    battery = checks(level, cache, cm_table)
    for name, fn in battery:
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        emit(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    emit(f"selftest {level}: {len(battery) - failed} passed, {failed} failed")
    return failed
