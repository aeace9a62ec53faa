from __future__ import annotations

import threading
from math import comb

import pytest

from wittkit import calculus
from wittkit.calculus import (
    CacheMiss,
    CeilingExceeded,
    FormatError,
    KeyMismatch,
    PolyCache,
    UniversalPolynomial,
)
from wittkit.substrate.poly import SparsePoly


def gens(names):
    return SparsePoly.gens(names)


def test_ghost_level_zero_and_one():
    for p in (2, 3, 5, 7):
        z = calculus.generate_ghost(p, 1)
        x0, x1 = gens(("x0", "x1"))
        assert z[0].body == SparsePoly.var("x0", ("x0",))
        assert z[1].body == x0 ** p + p * x1


def test_ghost_level_two_p2():
    x0, x1, x2 = gens(("x0", "x1", "x2"))
    assert calculus.generate_ghost(2, 2)[2].body == x0 ** 4 + 4 * x0 ** 2 * x1 + 6 * x1 ** 2 + 4 * x2


def test_ghost_matches_iterated_frobenius():
    # phi(x_i) = x_i^p + p x_{i+1} applied n times to x0
    p, n = 3, 3
    v = calculus.xvars(n)
    xs = gens(v)
    phi = [xs[i] ** p + p * xs[i + 1] for i in range(n)] + [xs[n]]
    f = xs[0]
    for _ in range(n):
        f = f.compose(phi)
    assert calculus.generate_ghost(p, n)[n].body == f


def test_sum_level_one():
    x0, x1, y0, y1 = gens(("x0", "x1", "y0", "y1"))
    assert calculus.generate_law(2, 1, "Sum")[1].body == x1 + y1 - x0 * y0
    assert calculus.generate_law(3, 1, "Sum")[1].body == x1 + y1 - x0 ** 2 * y0 - x0 * y0 ** 2


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_level_one_laws_are_the_delta_axioms(p):
    x0, x1, y0, y1 = gens(("x0", "x1", "y0", "y1"))
    correction = SparsePoly.zero(("x0", "x1", "y0", "y1"))
    for i in range(1, p):
        correction = correction + (comb(p, i) // p) * x0 ** i * y0 ** (p - i)
    assert calculus.generate_law(p, 1, "Sum")[1].body == x1 + y1 - correction
    assert calculus.generate_law(p, 1, "Product")[1].body == x0 ** p * y1 + x1 * y0 ** p + p * x1 * y1


def test_negation_p2():
    laws = calculus.generate_law(2, 1, "Negation")
    x0, x1 = gens(("x0", "x1"))
    assert laws[0].body == -SparsePoly.var("x0", ("x0",))
    assert laws[1].body == -x1 - x0 ** 2


def test_negation_cancels_under_the_sum_law():
    p, n = 3, 2
    S = calculus.generate_law(p, n, "Sum")
    N = calculus.generate_law(p, n, "Negation")
    xs = gens(calculus.xvars(n))
    for m in range(n + 1):
        subs = xs[: m + 1] + [N[i].body.embed(calculus.xvars(n)) for i in range(m + 1)]
        ordered = [None] * (2 * (m + 1))
        # variables of S_m are x0..xm, y0..ym
        ordered[: m + 1] = subs[: m + 1]
        ordered[m + 1 :] = subs[m + 1 :]
        assert S[m].body.compose(ordered).is_zero()


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 2)])
def test_levelwise_and_shift_methods_agree(p, n):
    for kind in ("Sum", "Product", "Negation"):
        a = calculus.generate_law(p, n, kind, method="shift")
        b = calculus.generate_law(p, n, kind, method="levelwise")
        assert [u.body for u in a] == [u.body for u in b]


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (5, 2)])
def test_exact_defect_vanishes(p, n):
    for kind in ("Sum", "Product", "Negation", "BJfromWitt", "WittFromBJ"):
        assert calculus.ghost_defect(p, n, kind).is_zero()


def test_modular_check_agrees_with_exact_expansion():
    for kind in ("Sum", "Product"):
        assert calculus.verify_ghost_identity(3, 2, kind)
    # a perturbed law must be rejected by both routes
    laws = list(calculus.generate_law(2, 2, "Sum"))
    bad_body = laws[2].body + SparsePoly.var("x0", laws[2].body.variables)
    laws[2] = UniversalPolynomial(2, 2, "Sum", bad_body)
    assert not calculus.verify_ghost_identity(2, 2, "Sum", laws)


def test_conversions_are_identity_through_level_one():
    for p in (2, 3, 5):
        for direction in ("BJfromWitt", "WittFromBJ"):
            laws = calculus.generate_conversion(p, 1, direction)
            x0, x1 = gens(("x0", "x1"))
            assert laws[0].body == SparsePoly.var("x0", ("x0",))
            assert laws[1].body == x1


def test_bj_from_witt_level_two_p2():
    x0, x1, x2 = gens(("x0", "x1", "x2"))
    b2 = calculus.generate_conversion(2, 2, "BJfromWitt")[2].body
    assert b2 == x2 - x1 ** 2 - x0 ** 2 * x1
    # the BJ ghost of (x0, x1, b2) equals the Witt ghost of (x0, x1, x2)
    z2 = calculus.generate_ghost(2, 2)[2].body
    w2 = calculus.generate_witt_ghost(2, 2)[2].body
    assert z2.compose([x0, x1, b2]) == w2


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (5, 2)])
def test_conversion_roundtrip(p, n):
    v = calculus.xvars(n)
    to_bj = [u.body.embed(v) for u in calculus.generate_conversion(p, n, "BJfromWitt")]
    to_witt = [u.body.embed(v) for u in calculus.generate_conversion(p, n, "WittFromBJ")]
    xs = gens(v)
    for m in range(n + 1):
        assert to_witt[m].compose(to_bj) == xs[m]
        assert to_bj[m].compose(to_witt) == xs[m]


def test_weights():
    for p, n in [(2, 3), (3, 2), (5, 2)]:
        for kind in ("Sum", "Product", "Negation", "Ghost", "WittGhost"):
            for u in calculus.generate(p, n, kind):
                assert u.weight_check(), (p, u.n, kind)


def test_product_is_bi_isobaric_not_total_weight():
    u = calculus.generate_law(2, 1, "Product")[1]
    # x0^2 y1 has weight 2 in x and 2 in y: the total weight is 2 p^n
    total = u.body.weights([1, 2, 1, 2])
    assert total == {4}
    assert u.weight_check()


def test_ceilings():
    with pytest.raises(CeilingExceeded):
        calculus.generate_law(11, 1, "Sum")
    with pytest.raises(CeilingExceeded):
        calculus.generate_ghost(2, 6)
    with pytest.raises(ValueError):
        calculus.generate_law(4, 1, "Sum")


# -- cache -------------------------------------------------------------------------

def test_cache_roundtrip(tmp_path):
    cache = PolyCache(tmp_path)
    laws = calculus.generate_law(2, 3, "Sum")
    for u in laws:
        cache.store(u)
    got = cache.load(2, 3, "Sum")
    assert got == laws[3]
    assert got.body.sorted_terms() == laws[3].body.sorted_terms()
    text = cache.path(2, 3, "Sum").read_text()
    assert text.startswith("WITTPOLY v1 p=2 n=3 kind=Sum\n")
    assert text.endswith(f"END {len(laws[3].body)}\n")


def test_cache_errors(tmp_path):
    cache = PolyCache(tmp_path)
    with pytest.raises(CacheMiss):
        cache.load(2, 1, "Sum")
    path = cache.store(calculus.generate_law(2, 2, "Sum")[2])
    with pytest.raises(KeyMismatch):
        cache.load_file(path, 3, 2, "Sum")
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(FormatError):
        cache.load(2, 2, "Sum")
    lines = text.splitlines(keepends=True)
    path.write_text(lines[0] + "".join(reversed(lines[1:-1])) + lines[-1])
    with pytest.raises(FormatError):
        cache.load(2, 2, "Sum")


def test_cache_get_generates_missing_levels(tmp_path):
    cache = PolyCache(tmp_path)
    laws = cache.get(3, 2, "Product")
    assert [u.n for u in laws] == [0, 1, 2]
    assert all(cache.path(3, m, "Product").exists() for m in range(3))
    assert cache.get(3, 2, "Product") == laws


def test_cache_dir_resolution(tmp_path, monkeypatch):
    monkeypatch.setenv("WITT_CACHE", str(tmp_path / "env"))
    assert calculus.default_cache_dir(tmp_path / "flag") == tmp_path / "flag"
    assert calculus.default_cache_dir() == tmp_path / "env"
    monkeypatch.delenv("WITT_CACHE")
    assert str(calculus.default_cache_dir()) == ".wittcache"


def test_concurrent_writers_leave_a_valid_file(tmp_path):
    u = calculus.generate_law(3, 2, "Sum")[2]
    errors = []

    def writer():
        try:
            for _ in range(5):
                PolyCache(tmp_path).store(u)
                assert PolyCache(tmp_path).load(3, 2, "Sum") == u
        except Exception as exc:  # pragma: no cover - surfaced below
            errors.append(exc)

    threads = [threading.Thread(target=writer) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert not list(tmp_path.glob(".tmp-*"))
