"""Built-in example categories and the brute-force Hochschild oracle.

The oracle works on a plain associative algebra (the total algebra of the
category, sum over all hom spaces) and builds the un-normalized complex
``C_n = A (x) A^{(x) n}`` directly, with no normalization and no category
machinery.  It splits by internal weight ``sum |a_i|`` so graded algebras
with negative degrees still give finite pieces.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import specio
from .chaincx import COMPLETE, TRUNCATED
from .exactla import SparseMatrix, rank

ORACLE_MAX_DIM = 8
ORACLE_MAX_LEN = 6


class SizeExceeded(ValueError):
    pass


def _m2(pairs):
    return [{"inputs": [a, b], "output": c} for a, b, c in pairs]


def _ground_field():
    return {
        "name": "ground-field",
        "objects": ["o"],
        "homs": [{"source": "o", "target": "o", "basis": [{"name": "1", "degree": 0}]}],
        "m2": _m2([("1", "1", "1")]),
        "units": {"o": "1"},
        "pairing": [{"left": "1", "right": "1", "value": "1"}],
        "dimension": 0,
    }


def _dual_numbers():
    return {
        "name": "dual-numbers",
        "objects": ["o"],
        "homs": [{"source": "o", "target": "o",
                  "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": 0}]}],
        "m2": _m2([("1", "1", "1"), ("1", "x", "x"), ("x", "1", "x")]),
        "units": {"o": "1"},
        "pairing": [{"left": "1", "right": "x", "value": "1"},
                    {"left": "x", "right": "1", "value": "1"}],
        "dimension": 0,
    }


def _sphere():
    return {
        "name": "sphere-cohomology",
        "objects": ["o"],
        "homs": [{"source": "o", "target": "o",
                  "basis": [{"name": "1", "degree": 0}, {"name": "x", "degree": -2}]}],
        "m2": _m2([("1", "1", "1"), ("1", "x", "x"), ("x", "1", "x")]),
        "units": {"o": "1"},
        "pairing": [{"left": "1", "right": "x", "value": "1"},
                    {"left": "x", "right": "1", "value": "1"}],
        "dimension": 2,
    }


def _matrix2():
    names = [f"E{i}{j}" for i in (1, 2) for j in (1, 2)]
    prods = []
    for i, j, k, l in itertools.product((1, 2), repeat=4):
        if j == k:
            prods.append((f"E{i}{j}", f"E{k}{l}", f"E{i}{l}"))
    pairing = []
    for i, j in itertools.product((1, 2), repeat=2):
        # tr(E_ij E_ji) = 1
        pairing.append({"left": f"E{i}{j}", "right": f"E{j}{i}", "value": "1"})
    return {
        "name": "matrix-2",
        "objects": ["o"],
        "homs": [{"source": "o", "target": "o", "basis": [{"name": n, "degree": 0} for n in names]}],
        "m2": _m2(prods),
        "units": {"o": [{"basis": "E11", "coeff": "1"}, {"basis": "E22", "coeff": "1"}]},
        "pairing": pairing,
        "dimension": 0,
    }


def _quiver_a2():
    return {
        "name": "quiver-a2",
        "objects": ["a", "b"],
        "homs": [
            {"source": "a", "target": "a", "basis": [{"name": "1a", "degree": 0}]},
            {"source": "a", "target": "b", "basis": [{"name": "f", "degree": 0}]},
            {"source": "b", "target": "b", "basis": [{"name": "1b", "degree": 0}]},
        ],
        "m2": _m2([("1a", "1a", "1a"), ("1b", "1b", "1b"), ("1a", "f", "f"), ("f", "1b", "f")]),
        "units": {"a": "1a", "b": "1b"},
    }


def _cyclic3():
    names = ["1", "g", "g2"]
    prods = [(names[a], names[b], names[(a + b) % 3]) for a in range(3) for b in range(3)]
    pairing = [{"left": names[a], "right": names[(-a) % 3], "value": "1"} for a in range(3)]
    return {
        "name": "cyclic-group-3",
        "objects": ["o"],
        "homs": [{"source": "o", "target": "o", "basis": [{"name": n, "degree": 0} for n in names]}],
        "m2": _m2(prods),
        "units": {"o": "1"},
        "pairing": pairing,
        "dimension": 0,
    }


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    spec: dict
    description: str
    # check -> (expected value, provenance tag, oracle description)
    expected: dict = field(default_factory=dict)

    def build(self):
        return specio.build(self.spec)


_ORACLE = "un-normalized brute-force Hochschild complex of the total algebra"

_ENTRIES = [
    CorpusEntry("ground-field", _ground_field(), "the ground field Q",
                {"hh_dims 0..3 L=6": ((1, 0, 0, 0), "TRIVIAL", "only normalized word is (1)")}),
    CorpusEntry("dual-numbers", _dual_numbers(), "Q[x]/(x^2), x in degree 0, d = 0",
                {"hh_dims 0..3 L=6": ((2, 1, 1, 1), "DERIVED", _ORACLE)}),
    CorpusEntry("sphere-cohomology", _sphere(), "H^{-*}(S^2; Q), |x| = -2, Poincare pairing, d = 2",
                {"duality_check": ("pass", "DERIVED", "HH_i and HH^{d+i} computed separately")}),
    CorpusEntry("matrix-2", _matrix2(), "M_2(Q) with trace pairing, d = 0",
                {"hh_dims 0..2 L=5": ((1, 0, 0), "DERIVED", _ORACLE)}),
    CorpusEntry("quiver-a2", _quiver_a2(), "path category of the quiver a -> b", {}),
    CorpusEntry("cyclic-group-3", _cyclic3(), "group algebra Q[Z/3] with pairing <g^a, g^b> = [a+b = 0]",
                {"hh_dims 0 L=6": ((3,), "DERIVED", "HH_0 = A/[A,A] as a rank")}),
]


def list_corpus() -> list[CorpusEntry]:
    return list(_ENTRIES)


def get(name: str) -> CorpusEntry:
    for e in _ENTRIES:
        if e.name == name:
            return e
    raise KeyError(f"no corpus entry named {name!r}; known: {', '.join(e.name for e in _ENTRIES)}")


# ---------------------------------------------------------------------------
# the oracle


@dataclass
class AssocAlgebra:
    """Finite-dimensional graded associative algebra with structure constants."""

    names: list[str]
    degrees: list[int]
    mult: dict  # (i, j) -> {k: coeff}

    @property
    def dim(self) -> int:
        return len(self.names)


def total_algebra(cat) -> AssocAlgebra:
    """Sum of all hom spaces; composable products from m_2, the rest zero."""
    if any(n >= 3 for n in cat.mults) or cat.mults.get(1):
        raise ValueError("oracle needs an associative algebra with zero differential")
    names = list(cat.basis)
    idx = {n: i for i, n in enumerate(names)}
    mult = {}
    for (x, y), out in cat.mults.get(2, {}).items():
        mult[(idx[x], idx[y])] = {idx[k]: Fraction(v) for k, v in out.items()}
    return AssocAlgebra(names, [cat.basis[n].degree for n in names], mult)


@dataclass
class OracleResult:
    max_len: int
    by_weight: dict  # (k, w) -> (dim, flag)
    dims: dict  # k -> (dim, flag), over all weights

    def piece(self, k, w):
        return self.by_weight.get((k, w))


def _feasible_beyond(alg: AssocAlgebra, k: int, first_n: int) -> bool:
    """Is there n >= first_n with a word of n+1 letters in degree k?

    Degree of such a word is w + n with (n+1) dmin <= w <= (n+1) dmax.
    """
    lo_d, hi_d = min(alg.degrees), max(alg.degrees)
    # need (n+1) lo_d + n <= k <= (n+1) hi_d + n, i.e. a_lo n <= b_lo and a_hi n >= b_hi
    lo = Fraction(first_n)
    hi = None
    for a, b, le in (((lo_d + 1), k - lo_d, True), ((hi_d + 1), k - hi_d, False)):
        # le: a n <= b ; else a n >= b
        if a == 0:
            if (le and b < 0) or (not le and b > 0):
                return False
            continue
        bound = Fraction(b, a)
        upper = (a > 0) == le
        if upper:
            hi = bound if hi is None else min(hi, bound)
        else:
            lo = max(lo, bound)
    start = math.ceil(lo)
    return hi is None or start <= hi


def brute_force_hochschild_oracle(alg: AssocAlgebra, max_len: int) -> OracleResult:
    """Homology of C_n(A, A) = A (x) A^{(x) n} for words of up to max_len letters.

    The boundary is the classical one with Koszul signs:
    a0[a1|..|an] -> (-1)^{|a0|} a0a1[a2|..]
                    + sum_i (-1)^{e_i} a0[..|a_i a_{i+1}|..]
                    + (-1)^{1 + (|an|+1) e_{n-1}} an a0[a1|..|a_{n-1}]
    where e_i = |a0| + sum_{j=1..i} (|a_j| + 1).
    """
    if alg.dim > ORACLE_MAX_DIM or max_len > ORACLE_MAX_LEN:
        raise SizeExceeded(f"oracle limited to dim <= {ORACLE_MAX_DIM}, L <= {ORACLE_MAX_LEN}")
    deg = alg.degrees
    # words by (n, weight)
    words: dict[tuple[int, int], list[tuple]] = {}
    for n in range(0, max_len):
        for w in itertools.product(range(alg.dim), repeat=n + 1):
            words.setdefault((n, sum(deg[i] for i in w)), []).append(w)
    index = {key: {w: i for i, w in enumerate(ws)} for key, ws in words.items()}

    # the i-th merge sign: i = 0 gives (-1)^{|a0|}; i >= 1 gives (-1)^{e_i}
    def boundary(word):
        n = len(word) - 1
        out: dict = {}
        for i in range(n):
            if i == 0:
                ex = deg[word[0]]
            else:
                ex = deg[word[0]] + sum(deg[word[j]] + 1 for j in range(1, i + 1))
            prod = alg.mult.get((word[i], word[i + 1]))
            if prod:
                for k, c in prod.items():
                    new = word[:i] + (k,) + word[i + 2:]
                    out[new] = out.get(new, 0) + (-c if ex % 2 else c)
        if n >= 1:
            e_last = deg[word[0]] + sum(deg[word[j]] + 1 for j in range(1, n))
            ex = 1 + (deg[word[n]] + 1) * e_last
            prod = alg.mult.get((word[n], word[0]))
            if prod:
                for k, c in prod.items():
                    new = (k,) + word[1:n]
                    out[new] = out.get(new, 0) + (-c if ex % 2 else c)
        return {w: c for w, c in out.items() if c}

    ranks: dict[tuple[int, int], int] = {}

    def rank_d(n, w):
        # d : (n, w) -> (n - 1, w)
        key = (n, w)
        if key in ranks:
            return ranks[key]
        src = words.get((n, w), [])
        tgt = index.get((n - 1, w), {})
        if not src or not tgt:
            ranks[key] = 0
            return 0
        entries = []
        for j, word in enumerate(src):
            for v, c in boundary(word).items():
                entries.append((tgt[v], j, c))
        ranks[key] = rank(SparseMatrix.from_entries(len(tgt), len(src), entries))
        return ranks[key]

    by_weight = {}
    for (n, w), ws in sorted(words.items()):
        if n > max_len - 2:
            continue
        k = w + n
        dim = len(ws) - rank_d(n, w) - rank_d(n + 1, w)
        by_weight[(k, w)] = (dim, COMPLETE)
    dims = {}
    for k in sorted({k for k, _ in by_weight}):
        total = sum(d for (kk, _), (d, _) in by_weight.items() if kk == k)
        flag = TRUNCATED if _feasible_beyond(alg, k, max_len - 1) else COMPLETE
        dims[k] = (total, flag)
    return OracleResult(max_len, by_weight, dims)


def hh0_commutator_quotient(alg: AssocAlgebra) -> int:
    """dim A/[A, A] as a rank, graded commutator with Koszul sign."""
    cols = []
    for i in range(alg.dim):
        for j in range(alg.dim):
            v: dict = {}
            for k, c in alg.mult.get((i, j), {}).items():
                v[k] = v.get(k, 0) + c
            s = -1 if (alg.degrees[i] * alg.degrees[j]) % 2 else 1
            for k, c in alg.mult.get((j, i), {}).items():
                v[k] = v.get(k, 0) - s * c
            cols.append({k: c for k, c in v.items() if c})
    m = SparseMatrix.from_columns(alg.dim, cols)
    return alg.dim - rank(m)


@dataclass
class OracleComparison:
    rows: list  # (k, [(w, normalized, oracle or None)], verdict)
    ok: bool


def compare_with_oracle(cat, max_len: int, degrees) -> OracleComparison:
    """Weight-refined comparison of normalized HH with the oracle.

    Only degrees complete in the normalized complex are compared.  Every
    weight carrying normalized homology must have a complete oracle piece,
    and every complete oracle piece must match.
    """
    from .hochschild import build_normalized_complex, hh_dims_by_weight
    from .chaincx import homology_dims

    hc = build_normalized_complex(cat, max_len)
    flags = homology_dims(hc.underlying, degrees)
    norm = hh_dims_by_weight(hc, degrees)
    orc = brute_force_hochschild_oracle(total_algebra(cat), max_len)
    rows = []
    ok = True
    for k in sorted(degrees):
        if flags[k][1] != COMPLETE:
            rows.append((k, [], None))
            continue
        weights = sorted({w for (kk, w) in norm if kk == k} | {w for (kk, w) in orc.by_weight if kk == k})
        cmp = []
        good = True
        for w in weights:
            a = norm.get((k, w), 0)
            piece = orc.piece(k, w)
            b = piece[0] if piece else None
            cmp.append((w, a, b))
            if b is None:
                if a:
                    good = False
            elif a != b:
                good = False
        rows.append((k, cmp, good))
        ok = ok and good
    return OracleComparison(rows, ok)
