from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wittkit.substrate import upoly
from wittkit.substrate.poly import NotDivisible, SparsePoly, poly_exact_div_by_int
from wittkit.substrate.rings import (
    GF,
    ZZ,
    GaloisRing,
    NotInvertible,
    ProductRing,
    Zmod,
    finite_ring_enumerate,
    is_irreducible_mod_p,
    tabulated_modulus,
)

X = ("x",)
T = ("t0", "t1")


def P(text_terms, variables):
    return SparsePoly(variables, dict(text_terms))


# -- exact division ---------------------------------------------------------------

def test_exact_div_halving():
    f = P({(2,): 2, (1,): 4}, X)
    assert poly_exact_div_by_int(f, 2) == P({(2,): 1, (1,): 2}, X)


def test_exact_div_rejects_odd_coefficient():
    with pytest.raises(NotDivisible):
        poly_exact_div_by_int(P({(2,): 1, (1,): -1}, X), 2)


def test_exact_div_prolongation_example():
    t0, t1 = SparsePoly.gens(T)
    num = (t0 ** 2 + 2 * t1) ** 2 - 1 - (t0 ** 2 - 1) ** 2
    got = poly_exact_div_by_int(num, 2)
    assert got == 2 * t0 ** 2 * t1 + 2 * t1 ** 2 + t0 ** 2 - 1
    assert 2 * got == num


def test_exact_div_by_zero():
    with pytest.raises(ZeroDivisionError):
        poly_exact_div_by_int(P({(1,): 2}, X), 0)


small_polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-20, 20).filter(bool), max_size=6
).map(lambda d: SparsePoly(T, d))


@settings(max_examples=60, deadline=None)
@given(small_polys, st.integers(-7, 7).filter(bool))
def test_exact_div_remultiplies(f, c):
    assert poly_exact_div_by_int(c * f, c) * c == c * f


# -- sparse polynomial arithmetic ----------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_poly_ring_axioms(f, g, h):
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f - f == SparsePoly.zero(T)


@settings(max_examples=40, deadline=None)
@given(small_polys, st.integers(-5, 5), st.integers(-5, 5))
def test_poly_evaluate_is_a_homomorphism(f, a, b):
    g = f * f + 3 * f
    assert g.evaluate((a, b), ZZ) == f.evaluate((a, b), ZZ) ** 2 + 3 * f.evaluate((a, b), ZZ)


@settings(max_examples=40, deadline=None)
@given(small_polys)
def test_poly_text_roundtrip(f):
    assert SparsePoly.from_text(f.to_text(), T) == f


def test_terms_sorted_graded_lex():
    t0, t1 = SparsePoly.gens(T)
    f = t1 ** 2 + t0 + t0 ** 2 * t1 + 1
    exps = [e for e, _ in f.sorted_terms()]
    assert exps == [(2, 1), (0, 2), (1, 0), (0, 0)]


def test_compose_matches_direct_substitution():
    t0, t1 = SparsePoly.gens(T)
    f = t0 ** 2 * t1 - 3 * t1
    g = f.compose([t0 + t1, t0 * t1])
    assert g == (t0 + t1) ** 2 * (t0 * t1) - 3 * (t0 * t1)


def test_large_product_matches_schoolbook():
    # big enough to take the multi-prime route on the compiled backend
    v = tuple(f"x{i}" for i in range(4))
    xs = SparsePoly.gens(v)
    f = (xs[0] + 2 * xs[1] - 3 * xs[2] + xs[3] + 7) ** 6
    g = (xs[0] * xs[1] - 5 * xs[3] + 11) ** 5
    h = f * g
    rng = random.Random(1)
    for _ in range(5):
        pt = [rng.randint(-9, 9) for _ in range(4)]
        assert h.evaluate(pt, ZZ) == f.evaluate(pt, ZZ) * g.evaluate(pt, ZZ)


# -- finite rings ------------------------------------------------------------------

@pytest.mark.parametrize(
    "ring, size",
    [(Zmod(4), 4), (GaloisRing(2, 1, (1, 1, 1)), 4), (GaloisRing(5, 2, (1, 1, 1)), 625)],
)
def test_enumerate_sizes(ring, size):
    elems = finite_ring_enumerate(ring)
    assert len(elems) == size
    assert len(set(elems)) == size
    assert elems == finite_ring_enumerate(ring)


def _axioms_hold(R, triples):
    for a, b, c in triples:
        assert R.eq(R.mul(R.mul(a, b), c), R.mul(a, R.mul(b, c)))
        assert R.eq(R.add(R.add(a, b), c), R.add(a, R.add(b, c)))
        assert R.eq(R.mul(a, R.add(b, c)), R.add(R.mul(a, b), R.mul(a, c)))
        assert R.eq(R.mul(a, b), R.mul(b, a))
        assert R.eq(R.add(a, R.neg(a)), R.zero)
        assert R.eq(R.mul(a, R.one), a)
        if R.is_unit(a):
            assert R.eq(R.mul(a, R.inv(a)), R.one)


@pytest.mark.parametrize("ring", [Zmod(4), Zmod(9), GaloisRing(2, 1, degree=2)])
def test_ring_axioms_exhaustive(ring):
    elems = list(ring.elements())
    _axioms_hold(ring, itertools.product(elems, repeat=3))


def test_ring_axioms_random_galois():
    R = GaloisRing(5, 2, degree=2)
    rng = random.Random(7)
    _axioms_hold(R, [tuple(R.random_element(rng) for _ in range(3)) for _ in range(200)])


def test_units_in_galois_ring():
    R = GaloisRing(3, 2, degree=2)
    units = [a for a in R.elements() if R.is_unit(a)]
    assert len(units) == 81 - 9  # elements not divisible by p
    with pytest.raises(NotInvertible):
        R.inv((3, 0))


def test_galois_frobenius_is_an_automorphism_of_order_d():
    R = GaloisRing(5, 3, degree=2)
    rng = random.Random(3)
    for _ in range(30):
        a, b = R.random_element(rng), R.random_element(rng)
        assert R.frobenius(R.mul(a, b)) == R.mul(R.frobenius(a), R.frobenius(b))
        assert R.frobenius(R.add(a, b)) == R.add(R.frobenius(a), R.frobenius(b))
        assert R.frobenius(R.frobenius(a)) == a
        # reduces to the p-power map on the residue field
        assert R.reduce(R.frobenius(a), 1) == R.reduce(R.pow(a, 5), 1)


def test_tabulated_moduli_irreducible():
    for p, d in [(2, 2), (2, 3), (3, 2), (5, 2), (5, 4), (7, 3), (11, 5), (13, 6)]:
        f = tabulated_modulus(p, d)
        assert len(f) == d + 1 and f[-1] == 1
        assert is_irreducible_mod_p(f, p)
    assert not is_irreducible_mod_p((1, 0, 1), 2)  # x^2 + 1 = (x + 1)^2


def test_product_ring_componentwise():
    R = ProductRing(Zmod(8), 2)
    assert R.mul((3, 5), (5, 7)) == (15 % 8, 35 % 8)
    assert R.size == 64


def test_galois_ring_rejects_reducible_modulus():
    with pytest.raises(ValueError):
        GaloisRing(2, 2, (1, 0, 1))


# -- univariate helpers ----------------------------------------------------------------

def test_find_roots_examples():
    assert upoly.find_roots([-1, 0, 1], GF(5)) == {1, 4}
    assert upoly.find_roots([1, 1, 1], GF(2)) == set()
    assert upoly.find_roots([-1, 0, 0, 1], GF(7)) == {1, 2, 4}


def _naive_roots(f, R):
    out = set()
    for a in R.elements():
        acc = R.zero
        for i, c in enumerate(f):
            acc = R.add(acc, R.mul(R.from_int(c), R.pow(a, i)))
        if R.is_zero(acc):
            out.add(a)
    return out


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-10, 10), min_size=2, max_size=6).filter(lambda f: f[-1] % 7), st.sampled_from([5, 7]))
def test_find_roots_matches_naive_evaluator(f, p):
    R = GF(p)
    if f[-1] % p == 0:
        return
    assert upoly.find_roots([c % p for c in f], R) == _naive_roots(f, R)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=2, max_size=6), st.sampled_from([7, 11, 13]))
def test_field_roots_agree_with_enumeration(f, p):
    R = GF(p)
    f = upoly.trim(R, [c % p for c in f])
    if len(f) < 2:
        return
    assert set(upoly.field_roots(f, R)) == upoly.find_roots(f, R)


def test_field_roots_in_extension():
    F = GaloisRing(5, 1, degree=2)
    # x^2 - 2 has no root in F_5 but splits in F_25
    roots = upoly.field_roots([F.from_int(-2), F.zero, F.one], F)
    assert len(roots) == 2
    for r in roots:
        assert F.eq(F.mul(r, r), F.from_int(2))
    assert roots == sorted(upoly.find_roots([F.from_int(-2), F.zero, F.one], F))


def test_hensel_root_examples():
    assert upoly.hensel_root([-1, 0, 1], Zmod(25), 4) == 24
    assert upoly.hensel_root([-2, 0, 1], Zmod(49), 3) == 10
    with pytest.raises(upoly.NonUnitDerivative):
        upoly.hensel_root([-1, 0, 1], Zmod(8), 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(2, 5), st.integers(1, 50))
def test_hensel_root_property(p, k, seed):
    rng = random.Random(seed)
    R = Zmod(p ** k)
    r_true = rng.randrange(p ** k)
    f = [(-r_true) % R.m, 1]
    g = [rng.randrange(1, p), rng.randrange(p), 1]
    poly = upoly.mul(R, f, g)
    # simple root: g(r_true) must be a unit
    if upoly.evaluate(R, g, r_true) % p == 0:
        return
    r = upoly.hensel_root(poly, R, r_true % p)
    assert r % p == r_true % p
    assert upoly.evaluate(R, poly, r) == 0


def test_hensel_root_in_galois_ring():
    S = GaloisRing(5, 3, degree=2)
    F = GaloisRing(5, 1, S.modulus)
    r0 = upoly.field_roots([F.from_int(-2), F.zero, F.one], F)[0]
    r = upoly.hensel_root([S.from_int(-2), S.zero, S.one], S, tuple(r0))
    assert S.eq(S.mul(r, r), S.from_int(2))


def test_hensel_factor_lifts_coprime_factorisation():
    R = Zmod(5 ** 6)
    f = upoly.add(R, upoly.mul(R, [2, 1], [2, 0, 1]), [5, 10, 0, 0])
    g, h = upoly.hensel_factor(R, f, [2, 1], [2, 0, 1], 8)
    assert len(g) == 2 and g[-1] == 1
    assert upoly.sub(R, f, upoly.mul(R, g, h)) == []
    assert [c % 5 for c in g] == [2, 1]
