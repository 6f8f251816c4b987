import pytest

from opentcft import corpus
from opentcft.ainftycy import check_ainfty_relations, check_units
from opentcft.chaincx import COMPLETE
from opentcft.corpus import (AssocAlgebra, SizeExceeded, brute_force_hochschild_oracle, compare_with_oracle,
                             hh0_commutator_quotient, total_algebra)
from opentcft.hochschild import hh_dims

NAMES = ["ground-field", "dual-numbers", "sphere-cohomology", "matrix-2", "quiver-a2", "cyclic-group-3"]


def test_shipped_set():
    assert [e.name for e in corpus.list_corpus()] == NAMES
    with pytest.raises(KeyError):
        corpus.get("nope")


def test_expectations_are_tagged():
    for e in corpus.list_corpus():
        for key, (value, tag, oracle) in e.expected.items():
            assert tag in ("TRIVIAL", "DERIVED")
            assert oracle


def test_oracle_ground_field():
    cat, _ = corpus.get("ground-field").build()
    res = brute_force_hochschild_oracle(total_algebra(cat), 4)
    assert res.dims[0][0] == 1
    assert all(v == 0 for k, (v, f) in res.dims.items() if k > 0 and f == COMPLETE)


def test_oracle_dual_numbers():
    cat, _ = corpus.get("dual-numbers").build()
    res = brute_force_hochschild_oracle(total_algebra(cat), 6)
    assert [res.dims[k][0] for k in range(4)] == [2, 1, 1, 1]
    assert hh_dims(cat, 6, range(4)) == {k: (v, COMPLETE) for k, v in zip(range(4), (2, 1, 1, 1))}


def test_cyclic_group_hh0_is_the_algebra():
    cat, _ = corpus.get("cyclic-group-3").build()
    alg = total_algebra(cat)
    assert hh0_commutator_quotient(alg) == 3
    res = brute_force_hochschild_oracle(alg, 5)
    assert res.dims[0][0] == 3


def test_matrix_hh0():
    cat, _ = corpus.get("matrix-2").build()
    assert hh0_commutator_quotient(total_algebra(cat)) == 1


def test_size_limit():
    big = AssocAlgebra([f"e{i}" for i in range(9)], [0] * 9, {})
    with pytest.raises(SizeExceeded):
        brute_force_hochschild_oracle(big, 3)


@pytest.mark.parametrize("name", NAMES)
def test_oracle_agreement(name):
    cat, cy = corpus.get(name).build()
    assert check_ainfty_relations(cat).ok and check_units(cat).ok
    cmp = compare_with_oracle(cat, 5, range(0, 5))
    assert cmp.ok
    assert any(v is not None for _, _, v in cmp.rows)
