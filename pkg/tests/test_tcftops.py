import pytest

from opentcft import corpus, specio
from opentcft.chaincx import homology_dims, verify_d_squared
from opentcft.exactla import SparseMatrix
from opentcft.hochschild import HigherMultiplication, build_normalized_complex, connes_B
from opentcft.tcftops import (ComparisonUnavailable, GLOBAL_SIGN, b_operator_via_annuli, build_tensor_complex,
                              compare_b_operators, compare_with_hochschild, psi_sign)

from conftest import EXTRA_DG, M3_SPEC

NAMES = [e.name for e in corpus.list_corpus()]


def test_ground_field_collapses():
    cat, _ = corpus.get("ground-field").build()
    tc = build_tensor_complex(cat, 4)
    assert tc.underlying.space.degrees() == [0]
    assert homology_dims(tc.underlying, [0, 1]) == {0: (1, "complete"), 1: (0, "complete")}


@pytest.mark.parametrize("name", ["dual-numbers", "quiver-a2"])
def test_dims_match(name):
    cat, _ = corpus.get(name).build()
    tc = build_tensor_complex(cat, 4).underlying
    hc = build_normalized_complex(cat, 4).underlying
    assert {k: tc.space.dim(k) for k in tc.degrees()} == {k: hc.space.dim(k) for k in hc.degrees()}


@pytest.mark.parametrize("name", NAMES)
def test_equivalence(name):
    cat, _ = corpus.get(name).build()
    res = compare_with_hochschild(cat, 4)
    assert res["ok"] and res["tensor_d_squared"], res["first_mismatch"]
    assert res["global_sign"] == GLOBAL_SIGN
    assert all(r["verdict"] == "match" for r in res["per_degree"].values())


@pytest.mark.parametrize("key", sorted(EXTRA_DG))
def test_equivalence_graded(key):
    cat, _ = specio.build(EXTRA_DG[key])
    res = compare_with_hochschild(cat, 4)
    assert res["ok"] and res["tensor_d_squared"], res["first_mismatch"]
    assert compare_b_operators(cat, 4)["ok"]


def test_generator_map_is_bijective():
    cat, _ = corpus.get("matrix-2").build()
    tc = build_tensor_complex(cat, 3)
    gm = tc.generator_map()
    hc = build_normalized_complex(cat, 3).underlying
    words = {w for k in hc.degrees() for w in hc.space.basis(k)}
    assert len(set(gm.values())) == len(gm) == len(words)
    assert set(gm.values()) == words
    # annulus labels are read off the targets of the letters
    for (labels, word), w in gm.items():
        assert labels == tuple(tc.category.basis[x].target for x in word)


def test_arity_filtration_counts():
    # annuli with n ports <-> normalized words of length n
    cat, _ = corpus.get("cyclic-group-3").build()
    gm = build_tensor_complex(cat, 4).generator_map()
    hc = build_normalized_complex(cat, 4)
    for n in range(1, 5):
        n_ann = sum(1 for (labels, _) in gm if len(labels) == n)
        n_words = sum(1 for k in hc.underlying.degrees() for w in hc.underlying.space.basis(k) if len(w) == n)
        assert n_ann == n_words


def test_tensor_complex_is_a_complex():
    cat, _ = corpus.get("sphere-cohomology").build()
    assert verify_d_squared(build_tensor_complex(cat, 5).underlying).ok


def test_psi_sign():
    cat, _ = specio.build(EXTRA_DG["odd"])
    assert psi_sign(cat, ("e", "e")) == -1
    assert psi_sign(cat, ("e", "e", "e")) == -1
    assert psi_sign(cat, ("1", "e")) == 1


def test_wrap_fault_is_localized():
    cat, _ = corpus.get("dual-numbers").build()
    res = compare_with_hochschild(cat, 4, fault="annulus-wrap")
    assert not res["ok"]
    assert res["first_mismatch"]["wrap_term"]


def test_dg_only():
    cat, _ = specio.build(M3_SPEC)
    with pytest.raises(HigherMultiplication):
        build_tensor_complex(cat, 3)


def test_b_operator_on_ground_field_is_zero():
    cat, _ = corpus.get("ground-field").build()
    assert all(m.is_zero() for m in b_operator_via_annuli(cat, 4).values())


@pytest.mark.parametrize("name", ["dual-numbers", "matrix-2"])
def test_b_operator_matches_connes(name):
    cat, _ = corpus.get(name).build()
    res = compare_b_operators(cat, 4)
    assert res["ok"]
    assert all(r["equal"] and r["square_zero"] for r in res["per_degree"].values())


def test_b_operator_needs_comparison():
    cat, _ = corpus.get("dual-numbers").build()
    with pytest.raises(ComparisonUnavailable):
        b_operator_via_annuli(cat, 3, {"ok": False})
