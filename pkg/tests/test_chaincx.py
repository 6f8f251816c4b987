import random
from fractions import Fraction

import pytest

from opentcft.chaincx import (COMPLETE, TRUNCATED, ChainComplex, GradedSpace, NotAComplex, dual_complex,
                              euler_characteristic, homology_dims, verify_d_squared)
from opentcft.exactla import SparseMatrix, kernel_basis, rank


def random_complex(rng: random.Random, length=4, max_dim=4) -> ChainComplex:
    """d_{k} built from kernel vectors of d_{k-1}, so d^2 = 0 by construction."""
    dims = [rng.randint(0, max_dim) for _ in range(length)]
    space = GradedSpace({k: tuple(range(n)) for k, n in enumerate(dims)})
    diffs = {}
    for k in range(1, length):
        prev = diffs.get(k - 1)
        if prev is None:
            allowed = [{i: Fraction(1)} for i in range(dims[k - 1])]
        else:
            allowed = kernel_basis(prev)
        cols = []
        for _ in range(dims[k]):
            v: dict = {}
            for a in allowed:
                c = rng.randint(-2, 2)
                for i, x in a.items():
                    v[i] = v.get(i, 0) + c * x
            cols.append({i: x for i, x in v.items() if x})
        diffs[k] = SparseMatrix.from_columns(dims[k - 1], cols)
    return ChainComplex(space, diffs)


@pytest.mark.parametrize("seed", range(200))
def test_random_complexes(seed):
    rng = random.Random(seed)
    c = random_complex(rng)
    assert verify_d_squared(c).ok
    degs = range(-1, 5)
    h = homology_dims(c, degs)
    for k in degs:
        ker = c.space.dim(k) - rank(c.d(k))
        assert h[k][0] == ker - rank(c.d(k + 1)) >= 0
    assert sum((-1) ** (k % 2) * h[k][0] for k in degs) == euler_characteristic(c)
    dual = dual_complex(c)
    assert verify_d_squared(dual).ok
    hd = homology_dims(dual, [-k for k in degs])
    assert all(hd[-k][0] == h[k][0] for k in degs)


def test_known_complexes():
    # Q --id--> Q is acyclic
    c = ChainComplex(GradedSpace({1: ("a",), 0: ("b",)}), {1: SparseMatrix.identity(1)})
    assert homology_dims(c, [0, 1]) == {0: (0, COMPLETE), 1: (0, COMPLETE)}
    z = ChainComplex(GradedSpace({0: ("p",)}))
    assert homology_dims(z, [0]) == {0: (1, COMPLETE)}


def test_d_squared_failure_is_reported():
    d1 = SparseMatrix.from_dense([[1]])
    d2 = SparseMatrix.from_dense([[1]])
    c = ChainComplex(GradedSpace({0: ("a",), 1: ("b",), 2: ("c",)}), {1: d1, 2: d2})
    rep = verify_d_squared(c)
    assert not rep.ok and rep.degree == 2
    with pytest.raises(NotAComplex):
        homology_dims(c, [1])


def test_truncation_flag_spreads_to_neighbours():
    c = ChainComplex(GradedSpace({0: ("a",), 1: ("b",)}), {}, {2: TRUNCATED})
    h = homology_dims(c, [0, 1])
    assert h[0][1] == COMPLETE and h[1][1] == TRUNCATED


def test_shape_check():
    with pytest.raises(ValueError):
        ChainComplex(GradedSpace({0: ("a",), 1: ("b",)}), {1: SparseMatrix(2, 1)})


def test_double_dual_negates_differential():
    rng = random.Random(7)
    c = random_complex(rng, 3, 3)
    dd = dual_complex(dual_complex(c))
    for k, m in c.differentials.items():
        assert dd.d(k) == m.scale(-1)
