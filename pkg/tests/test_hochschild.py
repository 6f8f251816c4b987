import random
from fractions import Fraction

import pytest

from opentcft import corpus, specio
from opentcft.ainftycy import Basis, from_dg_category, with_unit_basis
from opentcft.chaincx import COMPLETE, ChainComplex, dual_complex, homology_dims, verify_d_squared
from opentcft.hochschild import (HigherMultiplication, b_operator_checks, build_cochain_complex,
                                 build_normalized_complex, connes_B, coproduct, coproduct_checks, cup_product,
                                 duality_check, hh_cohomology_dims, hh_dims)

from conftest import DG_SPEC, M3_SPEC, ODD_SPEC, TWO_SPEC


def cat_of(name):
    return corpus.get(name).build()


def test_ground_field():
    cat, _ = cat_of("ground-field")
    hc = build_normalized_complex(cat, 4)
    assert hc.underlying.space.degrees() == [0]
    assert hh_dims(cat, 4, range(0, 3)) == {0: (1, COMPLETE), 1: (0, COMPLETE), 2: (0, COMPLETE)}
    assert hh_cohomology_dims(cat, 4, [0, 1])[0][0] == 1
    assert all(m.is_zero() for m in connes_B(hc).values())


def test_dual_number_chain_dims():
    cat, _ = cat_of("dual-numbers")
    hc = build_normalized_complex(cat, 6)
    # a (x) x^{(x) n} with a in {1, x}
    assert [hc.underlying.space.dim(k) for k in range(6)] == [2] * 6
    dims = hh_dims(cat, 6, range(4))
    assert [dims[k] for k in range(4)] == [(2, COMPLETE), (1, COMPLETE), (1, COMPLETE), (1, COMPLETE)]


def test_matrix_chain_dims_by_enumeration():
    cat, _ = cat_of("matrix-2")
    hc = build_normalized_complex(cat, 3)
    ucat = with_unit_basis(cat)
    unit = ucat.unit_basis_name("o")
    names = list(ucat.basis)
    for n in (1, 2, 3):
        count = sum(1 for w in _words(names, n) if unit not in w[1:])
        assert hc.underlying.space.dim(n - 1) == count == 4 * 3 ** (n - 1)
    dims = hh_dims(cat, 5, range(3))
    assert [dims[k][0] for k in range(3)] == [1, 0, 0]


def _words(names, n):
    if n == 0:
        yield ()
        return
    for w in _words(names, n - 1):
        for x in names:
            yield w + (x,)


def test_quiver_loops_only():
    cat, _ = cat_of("quiver-a2")
    hc = build_normalized_complex(cat, 4)
    for k in hc.underlying.degrees():
        for w in hc.underlying.space.basis(k):
            assert cat.basis[w[-1]].target == cat.basis[w[0]].source
    assert hh_dims(cat, 4, [0])[0][0] == 2


def test_higher_products_rejected():
    cat, _ = specio.build(M3_SPEC)
    with pytest.raises(HigherMultiplication):
        build_normalized_complex(cat, 3)


@pytest.mark.parametrize("name", ["ground-field", "dual-numbers", "sphere-cohomology", "matrix-2",
                                  "quiver-a2", "cyclic-group-3"])
def test_d_squared_and_B(name):
    cat, _ = cat_of(name)
    hc = build_normalized_complex(cat, 5)
    assert verify_d_squared(hc.underlying).ok
    res = b_operator_checks(hc, range(0, 3))
    checked = [r for r in res.values() if r["checked"]]
    assert checked
    assert all(r["B2_zero"] and r["Bd_plus_dB_zero"] for r in checked)


def test_B_on_dual_numbers_by_hand():
    cat, _ = cat_of("dual-numbers")
    hc = build_normalized_complex(cat, 4)
    B = connes_B(hc)
    idx0, idx1 = hc.index(0), hc.index(1)
    # B(x) = 1 (x) x
    col = B[0].column(idx0[("x",)])
    assert col == {idx1[("1", "x")]: 1}
    # B(1) = 0 in the normalized complex
    assert B[0].column(idx0[("1",)]) == {}
    # B(x (x) x) = 1 (x) x (x) x + sign * 1 (x) x (x) x, two cyclic terms on the same word
    idx2 = hc.index(2)
    c = B[1].column(idx1[("x", "x")])
    assert set(c) <= {idx2[("1", "x", "x")]}


@pytest.mark.parametrize("doc", [DG_SPEC, ODD_SPEC, TWO_SPEC], ids=["dg", "odd", "two"])
def test_graded_examples(doc):
    cat, _ = specio.build(doc)
    hc = build_normalized_complex(cat, 5)
    assert verify_d_squared(hc.underlying).ok
    cc = build_cochain_complex(cat, 4)
    assert verify_d_squared(cc.underlying).ok
    res = b_operator_checks(hc, range(-2, 4))
    assert all(r["B2_zero"] and r["Bd_plus_dB_zero"] for r in res.values() if r["checked"])


def random_dg(seed):
    """Random unital graded-commutative quotient: 1 plus nilpotent generators with zero products."""
    rng = random.Random(seed)
    objs = ["a", "b", "c"][: rng.randint(1, 3)]
    basis = [Basis(f"1{o}", o, o, 0) for o in objs]
    comp = {(f"1{o}", f"1{o}"): {f"1{o}": 1} for o in objs}
    extra = []
    for k in range(rng.randint(1, 4)):
        s, t = rng.choice(objs), rng.choice(objs)
        name = f"e{k}"
        basis.append(Basis(name, s, t, rng.randint(-1, 1)))
        comp[(f"1{s}", name)] = {name: 1}
        comp[(name, f"1{t}")] = {name: 1}
        extra.append(name)
    units = {o: {f"1{o}": 1} for o in objs}
    return from_dg_category(objs, basis, comp, {}, units)


@pytest.mark.parametrize("seed", range(20))
def test_random_dg_d_squared(seed):
    cat = random_dg(seed)
    hc = build_normalized_complex(cat, 4)
    assert verify_d_squared(hc.underlying).ok
    assert verify_d_squared(build_cochain_complex(cat, 3).underlying).ok


def test_two_cochain_models_agree_on_dual_numbers():
    cat, cy = cat_of("dual-numbers")
    chains = build_normalized_complex(cat, 5)
    dual = dual_complex(chains.underlying)
    direct = build_cochain_complex(cat, 5).underlying
    a = homology_dims(dual, range(-3, 1))
    b = homology_dims(direct, range(-3, 1))
    for k in range(-3, 1):
        if a[k][1] == COMPLETE and b[k][1] == COMPLETE:
            assert a[k][0] == b[k][0]


def test_corrupted_cochain_differential_disagrees():
    cat, _ = cat_of("dual-numbers")
    cc = build_cochain_complex(cat, 5).underlying
    dual = dual_complex(build_normalized_complex(cat, 5).underlying)
    from opentcft.exactla import SparseMatrix
    k = next(k for k in sorted(cc.differentials) if cc.d(k).nnz() and all(
        f == COMPLETE for f in (cc.flag(k - 2), cc.flag(k - 1), cc.flag(k), cc.flag(k + 1))))
    m = cc.d(k)
    broken = SparseMatrix.from_entries(m.rows, m.cols, list(m.entries())[1:])
    diffs = dict(cc.differentials)
    diffs[k] = broken
    bad = ChainComplex(cc.space, diffs)
    # dropping the only term of a one-entry coboundary changes a rank
    assert m.nnz() == 1
    def dims(c):
        return [v for v, _ in homology_dims(c, [k - 1, k]).values()]
    assert dims(cc) == dims(dual)
    assert dims(bad) != dims(dual)


def test_duality():
    for name in ("ground-field", "sphere-cohomology", "matrix-2", "dual-numbers", "cyclic-group-3"):
        _, cy = cat_of(name)
        rep = duality_check(cy, 4, range(-2, 3))
        assert rep.ok, name
        assert any(r[3] == COMPLETE for r in rep.rows)
        assert duality_check(cy.scaled(Fraction(-3, 2)), 4, range(-2, 3)).ok


def test_cup_product():
    cat, _ = cat_of("ground-field")
    cc = build_cochain_complex(cat, 3)
    t = cup_product(cc, [0])
    assert t.product(0, 0, 0, 0) == [1]
    cat, _ = cat_of("matrix-2")
    cc = build_cochain_complex(cat, 3)
    t = cup_product(cc, [0])
    assert t.bases[0].dim == 1  # the center of M_2
    cat, _ = cat_of("dual-numbers")
    cc = build_cochain_complex(cat, 5)
    t = cup_product(cc, [0, 1, 2])
    # associativity on the degree 0 part
    b0 = t.bases[0].dim
    for a in range(b0):
        for b in range(b0):
            for c in range(b0):
                ab = t.product(0, a, 0, b)
                bc = t.product(0, b, 0, c)
                left = [sum(ab[i] * t.product(0, i, 0, c)[r] for i in range(b0)) for r in range(b0)]
                right = [sum(bc[i] * t.product(0, a, 0, i)[r] for i in range(b0)) for r in range(b0)]
                assert left == right


def test_coproduct():
    _, cy = cat_of("ground-field")
    cp = coproduct(cy, 3, [0])
    assert cp.apply(0, 0) == {(0, 0, 0, 0): 1}
    for name, d in (("sphere-cohomology", 2), ("matrix-2", 0), ("dual-numbers", 0)):
        _, cy = cat_of(name)
        cp = coproduct(cy, 4, range(-3, 4))
        res = coproduct_checks(cp)
        assert res["ok"] and res["compared"] > 0, name
        for i in cp.degrees:
            for col in cp.matrices[i].values():
                for (i1, _, i2, _) in col:
                    assert i1 + i2 == i - d


def test_broken_coproduct_is_caught():
    _, cy = cat_of("dual-numbers")
    cp = coproduct(cy, 4, range(0, 3))
    col = cp.matrices[0][0]
    key = next(iter(col))
    col[key] = col[key] * 2
    assert not coproduct_checks(cp)["coassociative"]
