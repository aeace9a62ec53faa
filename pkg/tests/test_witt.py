from __future__ import annotations

import itertools
import random

import pytest

from wittkit import witt
from wittkit.substrate.rings import ZZ, GF, Zmod
from wittkit.witt import InImage, NotInImage, ShapeMismatch, WittRing


def W(base, p, n):
    return WittRing(base, p, n)


# -- arithmetic examples -----------------------------------------------------------

def test_add_mul_neg_examples():
    W1 = W(GF(2), 2, 1)
    assert witt.witt_arith(W1, "add", (1, 0), (1, 0)) == (0, 1)
    assert witt.witt_arith(W1, "mul", (0, 1), (0, 1)) == (0, 0)
    assert witt.witt_arith(W(ZZ, 2, 1), "neg", (1, 1)) == (-1, -2)


def test_arith_matches_integers_mod_4():
    W1 = W(GF(2), 2, 1)
    table = witt.integer_isomorphism(2, 1)
    assert table[1] == (1, 0) and table[2] == (0, 1)
    assert W1.add(table[1], table[1]) == table[2]


def test_shape_mismatch():
    W1 = W(GF(2), 2, 1)
    with pytest.raises(ShapeMismatch):
        W1.add((1, 0), (1, 0, 0))


# -- structure maps --------------------------------------------------------------------

def test_truncate_and_delta_shift():
    W2 = W(ZZ, 3, 2)
    a = (4, 5, 6)
    assert W2.truncate(a) == (4, 5)
    assert W2.truncate(a, 0) == (4,)
    assert W2.delta_shift(a) == (5, 6)
    W0 = W(ZZ, 3, 0)
    with pytest.raises(ShapeMismatch):
        W0.delta_shift((4,))
    with pytest.raises(ShapeMismatch):
        W0.truncate((4,))


def test_truncation_is_additive_over_f3():
    W2, W1 = W(GF(3), 3, 2), W(GF(3), 3, 1)
    a, b = (1, 2, 0), (2, 2, 1)
    assert W2.truncate(W2.add(a, b)) == W1.add(W2.truncate(a), W2.truncate(b))


def test_delta_of_sum_is_the_sum_law_on_tails():
    W2 = W(GF(2), 2, 2)
    S = witt._bodies(2, 2, "Sum")
    for a, b in itertools.product(list(W2.elements()), repeat=2):
        s = W2.add(a, b)
        # delta(a + b) reads S_1, S_2 evaluated on the full vectors
        assert W2.delta_shift(s) == tuple(
            S[m].evaluate(a[: m + 1] + b[: m + 1], GF(2)) for m in (1, 2)
        )


def test_frobenius_examples():
    assert W(ZZ, 2, 2).frobenius((0, 1, 0)) == (2, 1)
    assert W(ZZ, 2, 1).frobenius((3, 5)) == (19,)
    assert W(ZZ, 2, 1).ghost_map((3, 5)) == (3, 19)
    with pytest.raises(ShapeMismatch):
        W(ZZ, 2, 0).frobenius((3,))


def test_frobenius_is_ghost_left_shift():
    rng = random.Random(1)
    for p, n in [(2, 3), (3, 2), (5, 2)]:
        R = W(ZZ, p, n)
        for _ in range(20):
            x = tuple(rng.randint(-30, 30) for _ in range(n + 1))
            assert R.truncated(n - 1).ghost_map(R.frobenius(x)) == R.ghost_map(x)[1:]


def test_ghost_examples():
    assert W(ZZ, 2, 1).ghost_map((3, 5)) == (3, 19)
    W1 = W(Zmod(4), 2, 1)
    kernel = sorted(a for a in W1.elements() if W1.ghost_map(a) == (0, 0))
    assert kernel == [(0, 0), (0, 2)]
    assert W(ZZ, 5, 0).ghost_map((7,)) == (7,)


def test_verschiebung_examples():
    assert W(GF(2), 2, 0).verschiebung((1,)) == (0, 1)
    W1, W2 = W(ZZ, 2, 1), W(ZZ, 2, 2)
    va, vb = W1.verschiebung((1, 0)), W1.verschiebung((1, 0))
    lhs = W2.mul(va, vb)
    rhs = W2.mul(W2.from_int(2), W1.verschiebung(W1.mul((1, 0), (1, 0))))
    assert lhs == rhs
    assert W2.truncate(va, 0) == (0,)


def test_verschiebung_is_additive():
    rng = random.Random(4)
    R = W(ZZ, 3, 2)
    up = W(ZZ, 3, 3)
    for _ in range(20):
        a = tuple(rng.randint(-9, 9) for _ in range(3))
        b = tuple(rng.randint(-9, 9) for _ in range(3))
        assert R.verschiebung(R.add(a, b)) == up.add(R.verschiebung(a), R.verschiebung(b))


def test_coplethysm_examples():
    W2 = W(ZZ, 2, 2)
    assert W2.coplethysm((5, 6, 7), 1, 1) == ((5, 6), (6, 7))
    assert W2.coplethysm((5, 6, 7), 2, 0) == ((5, 6, 7),)
    with pytest.raises(ShapeMismatch):
        W2.coplethysm((5, 6, 7), 1, 2)


def test_coplethysm_is_a_ring_map_over_f2():
    W2 = W(GF(2), 2, 2)
    T = W2.coplethysm_target(1, 1)
    for a, b in itertools.product(list(W2.elements()), repeat=2):
        assert W2.coplethysm(W2.add(a, b), 1, 1) == T.add(W2.coplethysm(a, 1, 1), W2.coplethysm(b, 1, 1))
        assert W2.coplethysm(W2.mul(a, b), 1, 1) == T.mul(W2.coplethysm(a, 1, 1), W2.coplethysm(b, 1, 1))


def test_equalizer_examples():
    W2 = W(ZZ, 2, 2)
    assert W2.equalizer_check(((1, 2), (2, 3)), 1, 1) == InImage((1, 2, 3))
    assert isinstance(W2.equalizer_check(((1, 2), (4, 3)), 1, 1), NotInImage)
    assert W2.equalizer_check(W2.coplethysm((8, 9, 10), 1, 1), 1, 1) == InImage((8, 9, 10))


def test_equalizer_matches_brute_force_image():
    W2 = W(GF(2), 2, 2)
    T = W2.coplethysm_target(1, 1)
    image = {W2.coplethysm(a, 1, 1): a for a in W2.elements()}
    elems = list(T.elements())
    assert len(elems) == 16
    for z in elems:
        verdict = W2.equalizer_check(z, 1, 1)
        if z in image:
            assert verdict == InImage(image[z])
        else:
            assert isinstance(verdict, NotInImage)


def test_ghost_retraction():
    assert witt.ghost_retraction([(4, 9)]) == (4, 9)
    W2 = W(ZZ, 2, 2)
    x = (3, -1, 2)
    nested = witt.ghost_of_nested(W2.coplethysm_target(1, 1), W2.coplethysm(x, 1, 1))
    assert witt.ghost_retraction(nested) == W2.ghost_map(x)
    rng = random.Random(3)
    W3 = W(ZZ, 3, 2)
    for _ in range(10):
        x = tuple(rng.randint(-10, 10) for _ in range(3))
        nested = witt.ghost_of_nested(W3.coplethysm_target(1, 1), W3.coplethysm(x, 1, 1))
        assert witt.ghost_retraction(nested) == W3.ghost_map(x)


def test_p_nilpotency_degree():
    assert witt.p_nilpotency_degree(GF(3), 3, 2) == 3
    assert witt.p_nilpotency_degree(GF(2), 2, 0) == 1
    W1 = W(Zmod(4), 2, 1)
    two = W1.from_int(2)
    assert two == (2, 3)
    assert W1.mul(two, two) == (0, 2)
    assert witt.p_nilpotency_degree(Zmod(4), 2, 1) == 3
    assert witt.p_nilpotency_degree(ZZ, 2, 1, bound=10) is None


# -- invariants -------------------------------------------------------------------------

def _check_axioms(R, triples):
    for a, b, c in triples:
        assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
        assert R.add(R.add(a, b), c) == R.add(a, R.add(b, c))
        assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
        assert R.add(a, b) == R.add(b, a)
        assert R.mul(a, b) == R.mul(b, a)
        assert R.add(a, R.neg(a)) == R.zero
        assert R.mul(a, R.one) == a


@pytest.mark.parametrize("p", [2, 3])
def test_ring_axioms_exhaustive(p):
    R = W(GF(p), p, 1)
    _check_axioms(R, itertools.product(list(R.elements()), repeat=3))


@pytest.mark.parametrize("base,p", [(GF(5), 5), (Zmod(4), 2)])
def test_ring_axioms_random(base, p):
    R = W(base, p, 2)
    rng = random.Random(p)
    _check_axioms(R, [tuple(R.random_element(rng) for _ in range(3)) for _ in range(500)])


def test_structure_maps_are_homomorphisms_on_w2_f2():
    R = W(GF(2), 2, 2)
    low = R.truncated(1)
    T = R.coplethysm_target(1, 1)
    F = GF(2)
    for a, b in itertools.product(list(R.elements()), repeat=2):
        for op in ("add", "mul"):
            s = getattr(R, op)(a, b)
            assert R.truncate(s) == getattr(low, op)(R.truncate(a), R.truncate(b))
            assert R.frobenius(s) == getattr(low, op)(R.frobenius(a), R.frobenius(b))
            assert R.coplethysm(s, 1, 1) == getattr(T, op)(R.coplethysm(a, 1, 1), R.coplethysm(b, 1, 1))
            ga, gb = R.ghost_map(a), R.ghost_map(b)
            assert R.ghost_map(s) == tuple(getattr(F, op)(x, y) for x, y in zip(ga, gb))


@pytest.mark.parametrize("base,p", [(GF(2), 2), (Zmod(4), 2)])
def test_square_of_kernel_of_truncation_lies_in_p_w(base, p):
    R = W(base, p, 1)
    pe = R.from_int(p)
    p_w = {R.mul(pe, w) for w in R.elements()}
    kernel = [a for a in R.elements() if R.truncate(a) == (base.zero,)]
    for a, b in itertools.product(kernel, repeat=2):
        assert R.mul(a, b) in p_w


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_witt_vectors_of_fp_are_integers_mod_p_power(p, n):
    R = W(GF(p), p, n)
    table = witt.integer_isomorphism(p, n)
    q = p ** (n + 1)
    assert len(set(table.values())) == q
    for i, j in itertools.product(range(q), repeat=2):
        assert R.add(table[i], table[j]) == table[(i + j) % q]
        assert R.mul(table[i], table[j]) == table[(i * j) % q]


def test_coassociativity_on_w3_f2():
    R = W(GF(2), 2, 3)
    for x in R.elements():
        # W_3 -> W_1(W_2) -> W_1(W_1(W_1))
        outer = R.coplethysm(x, 2, 1)
        inner = R.truncated(2)
        route1 = tuple(inner.coplethysm(w, 1, 1) for w in outer)
        # W_3 -> W_2(W_1) -> W_1(W_1(W_1))
        mid = R.coplethysm_target(1, 2)
        route2 = mid.coplethysm(R.coplethysm(x, 1, 2), 1, 1)
        assert route1 == route2


def test_counit_first_window_is_truncation():
    rng = random.Random(0)
    R = W(ZZ, 3, 3)
    for _ in range(20):
        x = tuple(rng.randint(-50, 50) for _ in range(4))
        for m in range(4):
            assert R.coplethysm(x, m, 3 - m)[0] == R.truncate(x, m)


def test_nested_ring_over_galois_ring():
    from wittkit.substrate.rings import GaloisRing

    R = W(GaloisRing(2, 1, degree=2), 2, 1)
    rng = random.Random(8)
    _check_axioms(R, [tuple(R.random_element(rng) for _ in range(3)) for _ in range(100)])


def test_witt_coordinate_conversion_roundtrip():
    rng = random.Random(6)
    R = W(ZZ, 2, 3)
    for _ in range(20):
        a = tuple(rng.randint(-20, 20) for _ in range(4))
        assert R.from_witt_coords(R.to_witt_coords(a)) == a


def test_parse_vector():
    W1 = W(GF(2), 2, 1)
    assert witt.parse_vector("(1,0)", W1) == (1, 0)
    with pytest.raises(ShapeMismatch):
        witt.parse_vector("(1,0,1)", W1)
    T = W1.coplethysm_target(1, 1)
    assert witt.parse_vector("((1,0),(0,1))", T) == ((1, 0), (0, 1))


def test_batch_matches_scalar_evaluation():
    R = W(Zmod(25), 5, 2)
    rng = random.Random(2)
    xs = [R.random_element(rng) for _ in range(30)]
    ys = [R.random_element(rng) for _ in range(30)]
    assert R.batch("Sum", xs, ys) == [R.add(a, b) for a, b in zip(xs, ys)]
    assert R.batch("Product", xs, ys) == [R.mul(a, b) for a, b in zip(xs, ys)]
