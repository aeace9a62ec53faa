"""Command-line front end: ``wittkit {poly,witt,delta,jet,canlift,selftest}``.

Output is plain text, one value per line, with stable ``key = value``
prefixes where a line carries a named quantity.  Usage errors exit with 2,
domain errors with 1.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import calculus, canonical, delta, jets, selftest, witt
from .substrate.poly import NotDivisible
from .substrate.rings import GF, NotInvertible

KIND_NAMES = {k.lower(): k for k in calculus.KINDS}

DOMAIN_ERRORS = (
    ArithmeticError,
    ValueError,
    jets.ParseError,
    KeyError,
    NotInvertible,
    NotDivisible,
)


# -- poly --------------------------------------------------------------------------

def cmd_poly(args) -> int:
    kind = KIND_NAMES.get(args.kind.lower())
    if kind is None:
        raise UsageError(f"unknown kind {args.kind!r}; choose from {', '.join(calculus.KINDS)}")
    cache = calculus.PolyCache(args.out or args.cache)
    laws = cache.get(args.p, args.n, kind)
    print(f"kind = {kind}  p = {args.p}  n = {args.n}  dir = {cache.directory}")
    print("level  terms  max_bits")
    for u in laws:
        print(f"{u.n:5d}  {len(u.body):5d}  {u.body.max_coeff_bits():8d}")
    if args.verify:
        ok = all(calculus.verify_ghost_identity(args.p, m, kind, laws[: m + 1]) for m in range(args.n + 1))
        print(f"ghost identity = {'ok' if ok else 'FAILED'}")
        return 0 if ok else 1
    if args.show is not None:
        print(f"{kind}_{args.show} = {laws[args.show].body}")
    return 0


# -- witt --------------------------------------------------------------------------

def _witt_ring(args) -> witt.WittRing:
    base = jets.ring_from_name(args.ring, args.p)
    return witt.WittRing(base, args.p, args.n)


def _read(W: witt.WittRing, text: str, coords: str):
    v = witt.parse_vector(text, W)
    return W.from_witt_coords(v) if coords == "witt" else v


def _show(W: witt.WittRing, v, coords: str) -> str:
    return W.format(W.to_witt_coords(v) if coords == "witt" else v)


def _split(text: str | None):
    if text is None:
        raise UsageError("this operation needs --split m,k")
    try:
        m, k = (int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"--split expects m,k (got {text!r})") from None
    return m, k


def cmd_witt(args) -> int:
    W = _witt_ring(args)
    op, vals, coords = args.op, args.values, args.coords
    arity = {"add": 2, "mul": 2, "sub": 2, "neg": 1, "trunc": 1, "ghost": 1, "frob": 1, "delta": 1,
             "ver": 1, "copleth": 1, "equalizer": 1, "retract": 1, "nilp": 0}
    if len(vals) != arity[op]:
        raise UsageError(f"witt {op} takes {arity[op]} vector argument(s)")
    if op in ("add", "mul", "sub"):
        a, b = (_read(W, v, coords) for v in vals)
        print(_show(W, getattr(W, op)(a, b), coords))
    elif op == "neg":
        print(_show(W, W.neg(_read(W, vals[0], coords)), coords))
    elif op == "ghost":
        g = W.ghost_map(_read(W, vals[0], coords))
        print("<" + ",".join(W.base.format(c) for c in g) + ">")
    elif op in ("frob", "delta", "trunc"):
        a = _read(W, vals[0], coords)
        maps = {"frob": W.frobenius, "delta": W.delta_shift, "trunc": W.truncate}
        res = maps[op](a)
        print(_show(W.truncated(W.n - 1), res, coords))
    elif op == "ver":
        a = _read(W, vals[0], coords)
        print(_show(witt.WittRing(W.base, W.p, W.n + 1), W.verschiebung(a), coords))
    elif op == "copleth":
        m, k = _split(args.split)
        z = W.coplethysm(_read(W, vals[0], coords), m, k)
        print(W.coplethysm_target(m, k).format(z))
    elif op == "equalizer":
        m, k = _split(args.split)
        target = W.coplethysm_target(m, k)
        z = witt.parse_vector(vals[0], target)
        verdict = W.equalizer_check(z, m, k)
        if isinstance(verdict, witt.InImage):
            print(f"in image: preimage = {W.format(verdict.preimage)}")
        else:
            print(f"not in image: first bad window = {verdict.witness}")
    elif op == "retract":
        if W.n < 1:
            raise UsageError("witt retract needs n >= 1")
        x = _read(W, vals[0], coords)
        nested = witt.ghost_of_nested(W.coplethysm_target(1, W.n - 1), W.coplethysm(x, 1, W.n - 1))
        fmt = W.base.format
        print("nested_ghost = <" + ",".join("<" + ",".join(fmt(c) for c in g) + ">" for g in nested) + ">")
        print("retraction = <" + ",".join(fmt(c) for c in witt.ghost_retraction(nested)) + ">")
        print("ghost = <" + ",".join(fmt(c) for c in W.ghost_map(x)) + ">")
    else:
        e = witt.p_nilpotency_degree(W.base, W.p, W.n)
        print(f"p_nilpotency_degree = {e if e is not None else 'none'}")
    return 0


# -- delta -------------------------------------------------------------------------

def cmd_delta(args) -> int:
    if args.action == "validate":
        tower = delta.DeltaTower.named(args.tower, args.p, args.levels)
        sample = "exhaustive" if args.sample is None else args.sample
        rep = delta.validate_delta(tower, sample, seed=args.seed)
        print(f"tower = {args.tower}  p = {args.p}  levels = {args.levels}")
        print(f"checked = {rep.checked}")
        for f in rep.failures:
            print(f.describe(tower))
        print(f"result = {'pass' if rep.passed else 'FAIL'}")
        return 0 if rep.passed else 1
    if args.action == "apply":
        tower = delta.DeltaTower.named(args.tower, args.p, args.levels)
        if tower.top < 1:
            raise UsageError("delta apply needs at least two levels")
        m = tower.top - 1 if args.level is None else args.level
        if not 0 <= m < tower.top:
            raise UsageError(f"--level must lie in 0..{tower.top - 1}")
        hi, lo = tower.rings[m + 1], tower.rings[m]
        x = witt.parse_vector(args.value, hi)
        fmt = getattr(lo, "format", str)
        print(f"delta = {fmt(delta.apply_delta(x, tower, m))}")
        print(f"phi = {fmt(delta.frobenius_from_delta(tower, m)(x))}")
        return 0
    if args.action == "from-frobenius":
        gens = tuple(g.strip() for g in args.gens.split(",") if g.strip())
        images = [jets.parse_polynomial(t, gens) for t in args.phi.split(",")]
        if len(images) != len(gens):
            raise UsageError("--phi needs one image per generator")
        rels = tuple(jets.parse_polynomial(t, gens) for t in args.relations.split(",") if t.strip())
        D = delta.delta_from_frobenius(delta.RingPresentation(gens, rels), images, args.p)
        for g, d in zip(gens, D.deltas):
            print(f"delta({g}) = {d}")
        back = delta.frobenius_from_delta(D)
        ok = list(back.images) == [f.embed(gens) for f in images]
        print(f"roundtrip = {'ok' if ok else 'FAILED'}")
        return 0 if ok else 1
    try:
        exps = [int(t) for t in args.exps.split(",") if t]
    except ValueError:
        raise UsageError(f"--exps expects a comma list of integers (got {args.exps!r})") from None
    rep = delta.hopf_delta_solve(args.p, exps, args.k)
    print(rep.describe())
    return 0


# -- jet ---------------------------------------------------------------------------

def cmd_jet(args) -> int:
    A = jets.parse_presentation(args.ring)
    if args.emit == "presentation":
        print(jets.jet_presentation(A, args.p, args.n).to_text())
        return 0
    if args.over is None:
        raise UsageError(f"--emit {args.emit} needs --over")
    C = jets.ring_from_name(args.over, args.p)
    if args.emit == "coghost":
        if args.point is None:
            raise UsageError("--emit coghost needs --point")
        point = [C.from_int(int(t)) for t in args.point.split(",")]
        J = jets.jet_presentation(A, args.p, args.n)
        if len(point) != len(J.generators) or not all(C.is_zero(rel.evaluate(point, C)) for rel in J.relations):
            raise ValueError(f"{args.point} is not a point of the jet presentation over {args.over}")
        for m, image in enumerate(jets.coghost_eval(point, A, args.p, args.n, C)):
            print(f"w_{m} = (" + ",".join(C.format(c) for c in image) + ")")
        return 0
    if args.emit == "points":
        J = jets.jet_presentation(A, args.p, args.n)
        pts = jets.enumerate_points(J, C, args.bound)
        print(f"{len(pts)} points")
        if args.list:
            names = J.as_presentation().generators
            for pt in pts:
                print("  " + " ".join(f"{v}={C.format(c)}" for v, c in zip(names, pt)))
        return 0
    rep = jets.adjunction_check(A, args.p, args.n, C, args.bound)
    print(f"jet_points = {rep.count_jet}")
    print(f"witt_points = {rep.count_witt}")
    print(f"result = {'pass' if rep.passed else 'FAIL'}")
    return 0 if rep.passed else 1


# -- canlift -----------------------------------------------------------------------

def cmd_canlift(args) -> int:
    p = args.p
    if p < 5 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise UsageError("--p must be a prime >= 5")
    E0 = canonical.EllipticCurve(GF(p), args.a % p, args.b % p).check()
    q = p ** args.k
    npts, ap = canonical.count_points_trace(E0)
    print(f"curve = y^2 = x^3 + {E0.a}*x + {E0.b} over F_{p}")
    print(f"j = {E0.j()}")
    print(f"points = {npts}")
    print(f"a_p = {ap}")
    print(f"ordinary = {'yes' if canonical.is_ordinary(E0) else 'no'}")
    if args.psi is not None:
        print(f"psi_{args.psi} = {canonical.division_polynomial(E0, args.psi)}")
    res = canonical.canonical_lift_j(E0, args.k, start_j=args.start_j)
    print(f"j_canonical = {res.j} (mod {q})")
    print(f"iterations = {res.iterations}")
    if args.trace:
        print("trace = " + " ".join(str(j) for j in res.trace))
    status = 0
    if args.oracle == "cm":
        table = canonical.load_cm_table(args.cm_table)
        D = ap * ap - 4 * p
        try:
            expect = canonical.cm_oracle_j(E0, args.k, table)
        except canonical.Unsupported as exc:
            print(f"oracle_cm = unsupported ({exc})")
        else:
            agree = expect == res.j
            print(f"oracle_cm = {expect} (mod {q}) D = {D} {'agree' if agree else 'DISAGREE'}")
            status = 0 if agree else 1
    if args.verify:
        rep = canonical.verify_vp_factorization(E0, args.k)
        print(f"frobenius_step = {rep.j_after_frobenius} (mod {q})")
        print(f"verschiebung_step = {rep.j_after_verschiebung} (mod {q})")
        if rep.kernel is not None:
            print(f"etale_kernel = {rep.kernel.format()} (mod {p ** args.k})")
        print(f"vp_factorization = {'pass' if rep.passed else 'FAIL'}")
        status = status or (0 if rep.passed else 1)
    return status


# -- selftest ----------------------------------------------------------------------

def cmd_selftest(args) -> int:
    cache = calculus.PolyCache(args.cache)
    table = canonical.load_cm_table(args.cm_table) if args.cm_table else None
    failed = selftest.run(args.level, cache, lambda line: print(line, flush=True), table)
    return 1 if failed else 0


# -- parser ------------------------------------------------------------------------

class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wittkit", description="Witt vectors, delta-rings, jets and canonical lifts.")
    ap.add_argument("--cache", default=None, help="law cache directory (default: $WITT_CACHE or ./.wittcache)")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("poly", help="generate and cache universal polynomials")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--kind", default="sum", help="sum, product, negation, ghost, wittghost, bjfromwitt, wittfrombj")
    sp.add_argument("--out", default=None, help="write cache files here (overrides --cache)")
    sp.add_argument("--verify", action="store_true", help="check the ghost identity exactly")
    sp.add_argument("--show", type=int, default=None, metavar="LEVEL", help="print one level")
    sp.set_defaults(func=cmd_poly)

    sp = sub.add_parser("witt", help="arithmetic in W_n(R)")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--ring", default="zz", help="f2, f9, z/8, zz, gr(p,k,d), ...")
    sp.add_argument("--coords", choices=("bj", "witt"), default="bj")
    sp.add_argument("--split", default=None, help="m,k for copleth and equalizer")
    sp.add_argument("op", choices=("add", "mul", "sub", "neg", "trunc", "ghost", "frob", "delta", "ver",
                                   "copleth", "equalizer", "retract", "nilp"))
    sp.add_argument("values", nargs="*")
    sp.set_defaults(func=cmd_witt)

    sp = sub.add_parser("delta", help="delta-ring checks")
    dsub = sp.add_subparsers(dest="action", required=True)
    v = dsub.add_parser("validate", help="check the delta axioms on a tower")
    v.add_argument("--tower", default="fermat", help="fermat, zero, witt")
    v.add_argument("--p", type=int, required=True)
    v.add_argument("--levels", type=int, required=True)
    v.add_argument("--sample", type=int, default=None, help="random pairs per level instead of all")
    v.add_argument("--seed", type=int, default=0)
    s = dsub.add_parser("solve-mu", help="Hopf-compatible deltas on the group algebra of mu_(p^n)")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--exps", required=True, help="comma list n_1,...,n_r")
    s.add_argument("--k", type=int, required=True)
    a = dsub.add_parser("apply", help="delta and phi of one element of a tower")
    a.add_argument("--tower", default="fermat", help="fermat, zero, witt")
    a.add_argument("--p", type=int, required=True)
    a.add_argument("--levels", type=int, required=True)
    a.add_argument("--level", type=int, default=None, help="source level minus one (default: top)")
    a.add_argument("value")
    f = dsub.add_parser("from-frobenius", help="delta on Z[gens] from a Frobenius lift")
    f.add_argument("--p", type=int, required=True)
    f.add_argument("--gens", required=True, help="comma list of generator names")
    f.add_argument("--phi", required=True, help="comma list of images, one per generator")
    f.add_argument("--relations", default="", help="comma list of relations (must vanish mod p)")
    sp.set_defaults(func=cmd_delta)

    sp = sub.add_parser("jet", help="arithmetic jet spaces")
    sp.add_argument("--ring", required=True, help='presentation such as "Z[t]/(t^2-1)"')
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--emit", choices=("presentation", "points", "adjunction", "coghost"), default="presentation")
    sp.add_argument("--point", default=None, help="jet point for coghost: comma list t^(0),...,t^(n) per generator")
    sp.add_argument("--over", default=None, help="finite ring for points: f2, gf4, z/4, ...")
    sp.add_argument("--bound", type=int, default=jets.DEFAULT_BOUND)
    sp.add_argument("--list", action="store_true", help="print the points too")
    sp.set_defaults(func=cmd_jet)

    sp = sub.add_parser("canlift", help="canonical lift of an ordinary elliptic curve")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--oracle", choices=("cm",), default=None)
    sp.add_argument("--cm-table", default=None)
    sp.add_argument("--start-j", type=int, default=None, help="start from this lift of j instead of (a, b)")
    sp.add_argument("--verify", action="store_true", help="check both halves of [p] = v o f")
    sp.add_argument("--psi", type=int, default=None, metavar="M", help="also print the M-th division polynomial mod p")
    sp.set_defaults(func=cmd_canlift)

    sp = sub.add_parser("selftest", help="run the invariant batteries")
    sp.add_argument("level", choices=("quick", "full"), nargs="?", default="quick")
    sp.add_argument("--cm-table", default=None)
    sp.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra:
        # vectors may follow options such as --split; keep them as positionals
        if hasattr(args, "values") and not any(t.startswith("--") for t in extra):
            args.values = list(args.values) + extra
        else:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
