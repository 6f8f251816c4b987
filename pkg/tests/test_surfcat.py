import itertools

import pytest

from opentcft import corpus, specio
from opentcft.surfcat import (DiscGenerator, NotInDPlus, ObjectMismatch, SurfaceCategory, act_on_annulus,
                              act_on_module, ainfty_defect, check_d_squared, disc_degree)

from conftest import DG_SPEC, M3_BROKEN_SPEC, M3_SPEC, associator_spec

SHIFTS = (0, 1, 2)


def test_degrees():
    assert SurfaceCategory(0).degree(SurfaceCategory(0).disc("abc")) == 0
    assert SurfaceCategory(0).degree(SurfaceCategory(0).annulus("a")) == 0
    sc2 = SurfaceCategory(2)
    assert sc2.degree(sc2.disc("abcab")) == 4
    assert disc_degree(1, 3) == disc_degree(2, 3) == 3
    assert sc2.degree(sc2.cup("a", "b")) == -2
    assert sc2.degree(sc2.annulus("abab")) == 3


def test_cyclic_normal_form():
    sc = SurfaceCategory(0)
    for labels in itertools.product("ab", repeat=5):
        g = DiscGenerator.make(labels, 0, sc)
        for r in range(5):
            rot = labels[r:] + labels[:r]
            h = DiscGenerator.make(rot, 0, sc)
            assert h.labels == g.labels
    # four points: rotation by one has sign -1
    assert DiscGenerator.make("aaaa", 0, sc).zero
    assert not DiscGenerator.make("abab", 0, sc).zero  # stabilized by a sign +1 rotation
    assert not DiscGenerator.make("aaa", 0, sc).zero
    g = DiscGenerator.make("baaa", 0, sc)
    assert g.labels == tuple("aaab") and g.sign == -1


@pytest.mark.parametrize("d", SHIFTS)
def test_zigzags(d):
    sc = SurfaceCategory(d)
    f = sc.tensor_diagrams(sc.cup("a", "b"), sc.identity(("a", "b")))
    g = sc.tensor_diagrams(sc.identity(("a", "b")), sc.cap("a", "b"))
    assert sc.chain(sc.compose_diagrams(g, f)) == sc.chain(sc.identity(("a", "b")))
    f = sc.tensor_diagrams(sc.identity(("b", "a")), sc.cup("a", "b"))
    g = sc.tensor_diagrams(sc.cap("a", "b"), sc.identity(("b", "a")))
    assert sc.chain(sc.compose_diagrams(g, f)) == sc.chain(sc.identity(("b", "a")), (-1) ** d)


@pytest.mark.parametrize("d", SHIFTS)
def test_unit_discs(d):
    sc = SurfaceCategory(d)
    left = sc.tensor_diagrams(sc.disc_plus("a"), sc.identity(("a", "b")))
    right = sc.tensor_diagrams(sc.identity(("a", "b")), sc.disc_plus("b"))
    ident = sc.chain(sc.identity(("a", "b")))
    assert sc.chain(sc.compose_diagrams(sc.disc_plus("aab"), left)) == ident
    assert sc.chain(sc.compose_diagrams(sc.disc_plus("abb"), right)) == ident
    # more than three points: gluing the unit disc gives 0
    u = sc.tensor_diagrams(sc.disc_plus("a"), sc.identity(("a", "b"), ("b", "c")))
    assert sc.chain(sc.compose_diagrams(sc.disc_plus("aabc"), u)).is_zero()


@pytest.mark.parametrize("d", SHIFTS)
def test_annulus_forgets_points(d):
    sc = SurfaceCategory(d)
    A = sc.annulus(("a", "a"))
    off_base = sc.tensor_diagrams(sc.identity(("a", "a")), sc.disc_plus("a"))
    assert sc.chain(sc.compose_diagrams(A, off_base)).is_zero()
    at_base = sc.tensor_diagrams(sc.disc_plus("a"), sc.identity(("a", "a")))
    assert not sc.chain(sc.compose_diagrams(A, at_base)).is_zero()


def test_object_mismatch():
    sc = SurfaceCategory(0)
    with pytest.raises(ObjectMismatch):
        sc.compose_diagrams(sc.disc_plus("abc"), sc.disc_plus("ab"))


@pytest.mark.parametrize("d", SHIFTS)
def test_small_boundaries(d):
    sc = SurfaceCategory(d)
    assert sc.boundary(sc.disc("abc")).is_zero()
    assert sc.boundary(sc.annulus("a")).is_zero()
    b = sc.boundary(sc.annulus("ab"))
    assert len(b) == 2
    assert all(sc.degree(dg) == 0 for dg, _ in b)


@pytest.mark.parametrize("d", SHIFTS)
def test_composition_and_leibniz(d):
    sc = SurfaceCategory(d)
    f = sc.chain(sc.tensor_diagrams(sc.identity(("x", "a")),
                                    sc.tensor_diagrams(sc.disc_plus("abcd"), sc.identity(("d", "e")))))
    g = sc.chain(sc.tensor_diagrams(sc.identity(("x", "a")), sc.disc_plus("ade")))
    h = sc.chain(sc.disc_plus("xae"))
    assert sc.compose(sc.compose(f, g), h) == sc.compose(f, sc.compose(g, h))
    g_deg = sc.degree(next(iter(g))[0])
    lhs = sc.boundary(sc.compose(f, g))
    rhs = sc.compose(f, sc.boundary(g)) + sc.compose(sc.boundary(f), g).scale((-1) ** g_deg)
    assert lhs == rhs


@pytest.mark.parametrize("d", SHIFTS)
def test_d_squared_small(d):
    rep = check_d_squared(5, d)
    assert rep["ok"], rep["failure"]
    assert rep["per_arity"][5]["generators"] == 2 * 2 ** 5


def test_d_squared_three_letters():
    assert check_d_squared(4, 1, alphabet=3)["ok"]


def test_fault_disc_split_fails_first_arity():
    rep = check_d_squared(5, 0, fault="disc-split")
    assert not rep["ok"]
    assert rep["failure"]["arity"] == 3
    assert max(rep["per_arity"]) == 3


def test_module_action_basics():
    cat, _ = corpus.get("matrix-2").build()
    sc = SurfaceCategory(0)
    unit = act_on_module(sc, sc.disc_plus("o"), cat, ())
    assert unit == {("E11",): 1, ("E22",): 1}
    for x in cat.basis:
        assert act_on_module(sc, sc.disc_plus("oo"), cat, (x,)) == {(x,): 1}
    for x, y in itertools.product(cat.basis, repeat=2):
        got = act_on_module(sc, sc.disc_plus("ooo"), cat, (x, y))
        i, j, k, l = x[1], x[2], y[1], y[2]
        want = {(f"E{i}{l}",): 1} if j == k else {}
        assert got == want


def test_module_action_rejects_non_dplus():
    cat, _ = corpus.get("dual-numbers").build()
    sc = SurfaceCategory(0)
    with pytest.raises((NotInDPlus, ValueError)):
        act_on_module(sc, sc.cap("o", "o"), cat, ("1", "x"))


def test_annulus_action_is_identity_on_letters():
    cat, _ = corpus.get("dual-numbers").build()
    sc = SurfaceCategory(0)
    labels, out = act_on_annulus(sc, sc.annulus(("o", "o")), cat, ("x", "x"))
    assert out == {("x", "x"): 1}


@pytest.mark.parametrize("entry", corpus.list_corpus(), ids=lambda e: e.name)
def test_boundary_acts_as_ainfty_relation(entry):
    cat, _ = entry.build()
    checked, bad = ainfty_defect(cat, 4, SurfaceCategory(0))
    assert checked and not bad


@pytest.mark.parametrize("d", (0, 1))
def test_ainfty_correspondence_with_higher_products(d):
    sc = SurfaceCategory(d)
    for doc, ok in ((M3_SPEC, True), (M3_BROKEN_SPEC, False), (DG_SPEC, True),
                    (associator_spec(1), True), (associator_spec(-1), False)):
        cat, _ = specio.build(doc)
        _, bad = ainfty_defect(cat, min(cat.max_arity, 5), sc)
        assert (not bad) == ok
