"""Normalized Hochschild chains and cochains of a unital dg category.

A chain word ``(p_0, ..., p_{n-1})`` is a composable loop of basis morphisms,
``p_i : a_i -> a_{i+1}`` (indices mod n), of degree ``sum |p_i| + n - 1``.
Normalization removes every word with a unit in a position ``i > 0``; the
category is first rewritten in a basis containing each unit.

Signs come from the cyclic bar construction on suspended letters
(``|s p| = |p| + 1``) with the suspended operations of :mod:`ainftycy`,
negated overall so that for ungraded algebras the differential is the
classical ``a0 a1 (x) .. + sum (-1)^i .. a_i a_{i+1} .. + (-1)^n a_n a0 (x) ..``.

Cochains are normalized multilinear maps from composable paths of non-unit
letters to hom spaces.  They are stored as chain complexes in homological
degree ``-j`` where ``j = sum(|p_i| + 1) - |output|`` is the cohomological
degree, so ``HH^j`` is ``H_{-j}`` of the stored complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ainftycy import AInftyCategory, CYStructure, with_unit_basis
from .chaincx import (COMPLETE, TRUNCATED, ChainComplex, GradedSpace, boundaries, cycles,
                      homology_dims)
from .exactla import QuotientCoordinates, SparseMatrix, SubspaceNotContained, rank



class HigherMultiplication(ValueError):
    """Raised for categories with m_n != 0 for some n >= 3."""


class DualityFailure(ValueError):
    pass


def _acc(target: dict, key, val) -> None:
    nv = target.get(key, 0) + val
    if nv:
        target[key] = nv
    else:
        target.pop(key, None)


class _Letters:
    """Precomputed letter data for a dg category in unit basis."""

    def __init__(self, cat: AInftyCategory):
        if not cat.is_dg():
            raise HigherMultiplication(
                "Hochschild complexes are built for dg categories only (m_n = 0 for n >= 3); "
                "supply a dg model of the category")
        self.cat = cat
        self.units = {}
        for a in cat.objects:
            name = cat.unit_basis_name(a)
            if name is None:
                raise ValueError(f"unit of {a!r} is not a basis element; call with_unit_basis first")
            self.units[a] = name
        self.unit_names = frozenset(self.units.values())
        self.src = {x: b.source for x, b in cat.basis.items()}
        self.tgt = {x: b.target for x, b in cat.basis.items()}
        self.deg = {x: b.degree for x, b in cat.basis.items()}
        self.sdeg = {x: b.degree + 1 for x, b in cat.basis.items()}
        self.m1 = cat.mults.get(1, {})
        self.m2 = cat.mults.get(2, {})
        # non-unit letters out of each object, in declared order
        self.out_letters: dict[str, list[str]] = {a: [] for a in cat.objects}
        self.all_out: dict[str, list[str]] = {a: [] for a in cat.objects}
        for a in cat.objects:
            for b in cat.objects:
                for x in cat.hom(a, b):
                    self.all_out[a].append(x)
                    if x not in self.unit_names:
                        self.out_letters[a].append(x)

    def mt1(self, x):
        return self.m1.get((x,), {})

    def mt2(self, x, y):
        out = self.m2.get((x, y))
        if not out:
            return {}
        if self.sdeg[x] % 2:
            return {k: -v for k, v in out.items()}
        return out

    def has_unit_tail(self, word) -> bool:
        return any(x in self.unit_names for x in word[1:])


# ---------------------------------------------------------------------------
# word enumeration and truncation bookkeeping


def _paths(L: _Letters, start: str, length: int, end: str | None = None):
    """Non-unit letter paths of the given length from ``start``."""
    def rec(prefix, obj):
        if len(prefix) == length:
            if end is None or obj == end:
                yield tuple(prefix)
            return
        for x in L.out_letters[obj]:
            prefix.append(x)
            yield from rec(prefix, L.tgt[x])
            prefix.pop()
    yield from rec([], start)


def normalized_words(L: _Letters, max_len: int):
    """All normalized loop words of length 1..max_len, in deterministic order."""
    for n in range(1, max_len + 1):
        for a in L.cat.objects:
            for x in L.all_out[a]:
                for tail in _paths(L, L.tgt[x], n - 1, end=a):
                    yield (x,) + tail


def chain_degree(L: _Letters, word) -> int:
    return sum(L.deg[x] for x in word) + len(word) - 1


def word_weight(L: _Letters, word) -> int:
    return sum(L.deg[x] for x in word)


class _LeakTest:
    """Decides whether words longer than the bound reach a given degree.

    ``heads`` are (start object, end object, base degree) triples for the
    non-path part of a basis element (the first letter of a chain word, or
    the output of a cochain); the rest is a path of non-unit letters, each
    adding a fixed shift to the degree.
    """

    def __init__(self, L: _Letters, bound: int, heads, shift_sign: int):
        self.L = L
        self.bound = bound
        self.heads = list(heads)
        self.sign = shift_sign  # +1: degree = base + sum shifts, -1: base - sum
        shifts = [L.sdeg[x] * shift_sign for a in L.out_letters for x in L.out_letters[a]]
        self.min_shift = min(shifts) if shifts else 0
        self.max_shift = max(shifts) if shifts else 0
        self.acyclic = self._acyclic()
        self._cache: dict[int, bool] = {}

    def _acyclic(self) -> bool:
        objs = self.L.cat.objects
        state = {a: 0 for a in objs}

        def visit(a):
            state[a] = 1
            for x in self.L.out_letters[a]:
                b = self.L.tgt[x]
                if state[b] == 1:
                    return False
                if state[b] == 0 and not visit(b):
                    return False
            state[a] = 2
            return True
        return all(state[a] or visit(a) for a in objs)

    def leaked(self, k: int) -> bool:
        if k not in self._cache:
            self._cache[k] = self._compute(k)
        return self._cache[k]

    def _compute(self, k: int) -> bool:
        raise NotImplementedError


class _ChainLeak(_LeakTest):
    """Chain words: first letter x : a -> b, then a non-unit path b -> a.

    A word of length n has n - 1 path letters; it exceeds the bound when
    n - 1 > bound - 1.
    """

    def __init__(self, L: _Letters, bound: int, heads):
        super().__init__(L, bound - 1, [], +1)
        self._heads = heads

    def _compute(self, k: int) -> bool:
        L = self.L
        if not any(L.out_letters.values()):
            return False
        up = self.min_shift >= 1
        down = self.max_shift <= -1
        if not (up or down or self.acyclic):
            return True
        frontier = {(b, b, base, a) for b, a, base in self._heads}
        length = 0
        while frontier:
            length += 1
            nxt = set()
            for pstart, cur, degv, goal in frontier:
                for x in L.out_letters[cur]:
                    nd = degv + L.sdeg[x]
                    if up and nd > k:
                        continue
                    if down and nd < k:
                        continue
                    nxt.add((pstart, L.tgt[x], nd, goal))
            frontier = nxt
            if length > self.bound:
                if any(d == k and cur == goal for _, cur, d, goal in frontier):
                    return True
        return False


class _CochainLeak(_LeakTest):
    """Cochain basis: a non-unit path a -> b with an output in Hom(a, b).

    Cohomological degree is ``sum(|x| + 1) - |output|``.
    """

    def __init__(self, L: _Letters, bound: int):
        super().__init__(L, bound, [], +1)
        self._outs: dict[tuple[str, str], set[int]] = {}
        for x, b in L.cat.basis.items():
            self._outs.setdefault((b.source, b.target), set()).add(b.degree)

    def _compute(self, j: int) -> bool:
        L = self.L
        if not any(L.out_letters.values()):
            return False
        up = self.min_shift >= 1
        down = self.max_shift <= -1
        if not (up or down or self.acyclic):
            return True
        out_degs = [d for s in self._outs.values() for d in s]
        lo_out, hi_out = min(out_degs), max(out_degs)
        frontier = {(a, a, 0) for a in L.cat.objects}
        length = 0
        while frontier:
            length += 1
            nxt = set()
            for start, cur, s in frontier:
                for x in L.out_letters[cur]:
                    ns = s + L.sdeg[x]
                    if up and ns - hi_out > j:
                        continue
                    if down and ns - lo_out < j:
                        continue
                    nxt.add((start, L.tgt[x], ns))
            frontier = nxt
            if length > self.bound:
                for start, cur, s in frontier:
                    if (s - j) in self._outs.get((start, cur), ()):
                        return True
        return False


class LeakFlags:
    """Lazy completeness map: degree -> COMPLETE / TRUNCATED."""

    def __init__(self, test, degree_map=lambda k: k, known=()):
        self._test = test
        self._map = degree_map
        self._known = sorted(set(known))

    def get(self, k, default=COMPLETE):
        return TRUNCATED if self._test.leaked(self._map(k)) else COMPLETE

    def items(self):
        lo = (self._known[0] - 1) if self._known else 0
        hi = (self._known[-1] + 1) if self._known else 0
        for k in range(lo, hi + 1):
            yield k, self.get(k)


# ---------------------------------------------------------------------------
# chain complex


@dataclass
class HochschildComplex:
    underlying: ChainComplex
    length_bound: int
    category: AInftyCategory
    letters: _Letters = field(repr=False)
    words: dict = field(repr=False, default_factory=dict)  # degree -> list of words

    def degree_of(self, word) -> int:
        return chain_degree(self.letters, word)

    def flag(self, k: int) -> str:
        return self.underlying.flag(k)

    def index(self, k: int) -> dict:
        return self.underlying.space.index(k)


def hochschild_differential(L: _Letters, word) -> dict:
    """Normalized Hochschild boundary of a basis word, as {word: coeff}."""
    n = len(word)
    out: dict = {}
    pre = 0
    for i, x in enumerate(word):
        # internal differential at position i
        for y, c in L.mt1(x).items():
            new = word[:i] + (y,) + word[i + 1:]
            _acc(out, new, -c if pre % 2 == 0 else c)
        if i < n - 1:
            for y, c in L.mt2(x, word[i + 1]).items():
                new = word[:i] + (y,) + word[i + 2:]
                _acc(out, new, -c if pre % 2 == 0 else c)
        pre += L.sdeg[x]
    if n >= 2:
        last = word[-1]
        rest = pre - L.sdeg[last]
        rot = (L.sdeg[last] * rest) % 2
        for y, c in L.mt2(last, word[0]).items():
            new = (y,) + word[1:-1]
            _acc(out, new, c if rot else -c)
    return {w: c for w, c in out.items() if not L.has_unit_tail(w)}


def _prepare(cat: AInftyCategory) -> _Letters:
    if not cat.is_dg():
        raise HigherMultiplication(
            "Hochschild complexes are built for dg categories only (m_n = 0 for n >= 3); "
            "supply a dg model of the category")
    return _Letters(with_unit_basis(cat))


def build_normalized_complex(cat: AInftyCategory, max_len: int) -> HochschildComplex:
    """Normalized Hochschild chains on loop words of length <= max_len."""
    if max_len < 1:
        raise ValueError("length bound must be >= 1")
    L = _prepare(cat)
    by_deg: dict[int, list] = {}
    for w in normalized_words(L, max_len):
        by_deg.setdefault(chain_degree(L, w), []).append(w)
    space = GradedSpace({k: tuple(v) for k, v in by_deg.items()})
    diffs = {}
    for k, ws in by_deg.items():
        tgt_idx = space.index(k - 1)
        entries = []
        for j, w in enumerate(ws):
            for v, c in hochschild_differential(L, w).items():
                entries.append((tgt_idx[v], j, c))
        if entries or space.dim(k - 1):
            diffs[k] = SparseMatrix.from_entries(space.dim(k - 1), len(ws), entries)
    flags = LeakFlags(_ChainLeak(L, max_len, [(L.tgt[x], L.src[x], L.deg[x])
                                               for a in L.cat.objects for x in L.all_out[a]]),
                      known=by_deg)
    cx = ChainComplex(space, diffs, flags)
    return HochschildComplex(cx, max_len, L.cat, L, by_deg)


def hh_dims(cat: AInftyCategory, max_len: int, degrees) -> dict[int, tuple[int, str]]:
    cx = build_normalized_complex(cat, max_len)
    return homology_dims(cx.underlying, degrees)


def hh_dims_by_weight(hc: HochschildComplex, degrees) -> dict[tuple[int, int], int]:
    """Homology split by internal weight sum |p_i| (needs m_1 = 0)."""
    L = hc.letters
    if L.m1:
        raise ValueError("weight splitting needs a zero differential")
    out = {}
    cx = hc.underlying
    for k in degrees:
        for w in sorted({word_weight(L, x) for x in cx.space.basis(k)}):
            def sel(deg):
                return [i for i, x in enumerate(cx.space.basis(deg)) if word_weight(L, x) == w]
            cur, lower, upper = sel(k), sel(k - 1), sel(k + 1)
            dk = cx.d(k).submatrix(lower, cur)
            dk1 = cx.d(k + 1).submatrix(cur, upper)
            out[(k, w)] = len(cur) - rank(dk) - rank(dk1)
    return out


# ---------------------------------------------------------------------------
# Connes B


def connes_B_word(L: _Letters, word) -> dict:
    """B(p_0 .. p_{n-1}) = sum_i +- (1, p_i, .., p_{n-1}, p_0, .., p_{i-1})."""
    n = len(word)
    out: dict = {}
    s = [L.sdeg[x] for x in word]
    total = sum(s)
    head = 0
    for i in range(n):
        rotated = word[i:] + word[:i]
        unit = L.units[L.src[rotated[0]]]
        new = (unit,) + rotated
        if not L.has_unit_tail(new):
            sign = (head * (total - head)) % 2
            _acc(out, new, -1 if sign else 1)
        head += s[i]
    return out


def connes_B(hc: HochschildComplex) -> dict[int, SparseMatrix]:
    """Matrices B_k : C_k -> C_{k+1} on the truncated complex."""
    L = hc.letters
    sp = hc.underlying.space
    out = {}
    for k in sp.degrees():
        tgt = sp.index(k + 1)
        entries = []
        for j, w in enumerate(sp.basis(k)):
            for v, c in connes_B_word(L, w).items():
                if v in tgt:
                    entries.append((tgt[v], j, c))
                elif len(v) <= hc.length_bound:
                    raise AssertionError(f"B produced unknown word {v}")
        out[k] = SparseMatrix.from_entries(sp.dim(k + 1), sp.dim(k), entries)
    return out


def b_operator_checks(hc: HochschildComplex, degrees) -> dict:
    """B^2 = 0 and Bd + dB = 0 on truncation-safe degrees."""
    B = connes_B(hc)
    cx = hc.underlying
    sp = cx.space

    def Bk(k):
        return B.get(k) or SparseMatrix(sp.dim(k + 1), sp.dim(k))

    res = {}
    for k in degrees:
        safe = all(cx.flag(j) == COMPLETE for j in (k - 1, k, k + 1, k + 2))
        if not safe:
            res[k] = {"checked": False}
            continue
        b2 = (Bk(k + 1) @ Bk(k)).is_zero()
        anti = (cx.d(k + 1) @ Bk(k)) + (Bk(k - 1) @ cx.d(k))
        res[k] = {"checked": True, "B2_zero": b2, "Bd_plus_dB_zero": anti.is_zero()}
    return res


# ---------------------------------------------------------------------------
# cochains


@dataclass
class CochainComplex:
    """Normalized Hochschild cochains, stored in homological degree -j."""

    underlying: ChainComplex
    length_bound: int
    letters: _Letters = field(repr=False)

    def hh_degree(self, j: int) -> int:
        return -j


def cochain_degree(L: _Letters, key) -> int:
    start, path, out = key
    return sum(L.sdeg[x] for x in path) - L.deg[out]


def cochain_basis(L: _Letters, max_len: int):
    """Keys (start object, path, output) for paths of length 0..max_len."""
    cat = L.cat
    for n in range(0, max_len + 1):
        for a in cat.objects:
            for path in _paths(L, a, n):
                b = L.tgt[path[-1]] if path else a
                for e in cat.hom(a, b):
                    yield (a, path, e)


def _coboundary_map(L: _Letters, key) -> dict:
    """delta F = mt o F - (-1)^{|F|} F o mt for the basis cochain F = key.

    F sends the suspended word ``s path`` to ``s out`` and all other
    normalized words to zero.  Returns {key': coeff} describing delta F.
    """
    a, path, e = key
    n = len(path)
    fdeg = (L.sdeg[e]) - sum(L.sdeg[x] for x in path)  # |F| on suspended spaces
    out: dict = {}

    def emit(word, start, vec, coef):
        for y, c in vec.items():
            _acc(out, (start, word, y), coef * c)

    # mt1 after F
    emit(path, a, L.mt1(e), 1)
    # mt2(x, F(...)) : input word (x, path), Koszul sign passing F over s x
    b = L.tgt[path[-1]] if path else a
    for src in L.cat.objects:
        for x in L.cat.hom(src, a):
            if x in L.unit_names:
                continue
            koszul = (fdeg * L.sdeg[x]) % 2
            emit((x,) + path, src, L.mt2(x, e), -1 if koszul else 1)
    # mt2(F(...), x) : input word (path, x)
    for x in L.out_letters[b]:
        emit(path + (x,), a, L.mt2(e, x), 1)
    # -(-1)^{|F|} F o mt : words w' whose contraction contains ``path``
    # handled by _coboundary_matrix through the transpose enumeration
    return out


def build_cochain_complex(cat: AInftyCategory, max_len: int) -> CochainComplex:
    """Direct normalized cochain model with the Gerstenhaber-bracket differential."""
    L = _prepare(cat)
    keys_by_j: dict[int, list] = {}
    for key in cochain_basis(L, max_len):
        keys_by_j.setdefault(cochain_degree(L, key), []).append(key)
    space = GradedSpace({-j: tuple(v) for j, v in keys_by_j.items()})
    cols: dict[int, dict[int, dict]] = {}  # homological degree k -> col -> {row: coeff}

    def add(key_from, key_to, c):
        kf = -cochain_degree(L, key_from)
        idx_to = space.index(kf - 1)
        if key_to not in idx_to:
            if len(key_to[1]) <= max_len:
                raise AssertionError(f"coboundary left the basis: {key_to}")
            return
        j = space.index(kf)[key_from]
        col = cols.setdefault(kf, {}).setdefault(j, {})
        _acc(col, idx_to[key_to], c)

    for j_deg, keys in keys_by_j.items():
        for key in keys:
            for k2, c in _coboundary_map(L, key).items():
                add(key, k2, c)
    # F o mt part: for every target word w' (length n or n+1) contract it
    for n in range(1, max_len + 1):
        for a in cat.objects:
            for wp in _paths(L, a, n):
                pre = 0
                for i, x in enumerate(wp):
                    contractions = []
                    for y, c in L.mt1(x).items():
                        contractions.append((wp[:i] + (y,) + wp[i + 1:], c))
                    if i < n - 1:
                        for y, c in L.mt2(x, wp[i + 1]).items():
                            contractions.append((wp[:i] + (y,) + wp[i + 2:], c))
                    for w, c in contractions:
                        if any(z in L.unit_names for z in w):
                            continue
                        b = L.tgt[w[-1]] if w else a
                        for e in L.cat.hom(a, b):
                            key = (a, w, e)
                            fdeg = L.sdeg[e] - sum(L.sdeg[z] for z in w)
                            koszul = pre % 2
                            sign = -(-1 if fdeg % 2 else 1) * (-1 if koszul else 1)
                            add(key, (a, wp, e), sign * c)
                    pre += L.sdeg[x]
    diffs = {}
    for k in space.degrees():
        entries = [(r, c, v) for c, col in cols.get(k, {}).items() for r, v in col.items()]
        diffs[k] = SparseMatrix.from_entries(space.dim(k - 1), space.dim(k), entries)
    flags = LeakFlags(_CochainLeak(L, max_len), degree_map=lambda k: -k, known=space.degrees())
    return CochainComplex(ChainComplex(space, diffs, flags), max_len, L)


def hh_cohomology_dims(cat: AInftyCategory, max_len: int, degrees) -> dict[int, tuple[int, str]]:
    """dim HH^j for j in degrees (cohomological indexing)."""
    cc = build_cochain_complex(cat, max_len)
    raw = homology_dims(cc.underlying, [-j for j in degrees])
    return {j: raw[-j] for j in degrees}


# ---------------------------------------------------------------------------
# cup product


def cup_basis(L: _Letters, f, g) -> dict:
    """(F u G) = (-1)^{|F|} mt2 o (F (x) G) for basis cochains F, G."""
    a, p, e = f
    b, q, h = g
    end_p = L.tgt[p[-1]] if p else a
    if end_p != b:
        return {}
    prod = L.mt2(e, h)
    if not prod:
        return {}
    fdeg = L.sdeg[e] - sum(L.sdeg[x] for x in p)
    gdeg = L.sdeg[h] - sum(L.sdeg[x] for x in q)
    s_p = sum(L.sdeg[x] for x in p)
    sign = (fdeg + gdeg * s_p) % 2
    return {(a, p + q, y): (-c if sign else c) for y, c in prod.items()}


def cup_vectors(L: _Letters, u: dict, v: dict) -> dict:
    out: dict = {}
    for f, cf in u.items():
        for g, cg in v.items():
            for k, c in cup_basis(L, f, g).items():
                _acc(out, k, cf * cg * c)
    return out


@dataclass
class CohomologyBasis:
    """Homology-level basis in one degree of a chain complex."""

    degree: int
    labels: tuple
    coords: QuotientCoordinates

    @property
    def dim(self) -> int:
        return self.coords.dim

    def rep(self, i: int) -> dict:
        """Representative as {label: coeff}."""
        return {self.labels[k]: v for k, v in self.coords.reps[i].items()}

    def coordinates(self, vec: dict) -> list[Fraction]:
        idx = {b: i for i, b in enumerate(self.labels)}
        return self.coords.coords({idx[k]: v for k, v in vec.items()})


def homology_basis(cx: ChainComplex, k: int) -> CohomologyBasis:
    z = cycles(cx, k)
    b = boundaries(cx, k)
    return CohomologyBasis(k, cx.space.basis(k), QuotientCoordinates(cx.space.dim(k), z, b))


@dataclass
class CupTable:
    degrees: list[int]
    bases: dict  # j -> CohomologyBasis (in the stored complex, degree -j)
    table: dict  # (j1, i1, j2, i2) -> {j: coords}

    def product(self, j1, i1, j2, i2) -> list[Fraction]:
        return self.table[(j1, i1, j2, i2)]


def cup_product(cc: CochainComplex, degrees) -> CupTable:
    """Multiplication table of HH^* on homology bases for degrees with complete sums."""
    L = cc.letters
    cx = cc.underlying
    degrees = sorted(degrees)
    bases = {j: homology_basis(cx, -j) for j in degrees}
    table = {}
    for j1 in degrees:
        for j2 in degrees:
            j = j1 + j2
            if j not in bases:
                if cx.flag(-j) != COMPLETE or cx.flag(-j1) != COMPLETE:
                    continue
                bases[j] = homology_basis(cx, -j)
            if any(cx.flag(-jj) != COMPLETE for jj in (j1 - 1, j1, j1 + 1, j2 - 1, j2, j2 + 1, j - 1, j, j + 1)):
                continue
            for i1 in range(bases[j1].dim):
                for i2 in range(bases[j2].dim):
                    prod = cup_vectors(L, bases[j1].rep(i1), bases[j2].rep(i2))
                    table[(j1, i1, j2, i2)] = bases[j].coordinates(prod)
    return CupTable(degrees, bases, table)


def unit_cochain(cc: CochainComplex) -> dict:
    L = cc.letters
    return {(a, (), L.units[a]): Fraction(1) for a in L.cat.objects}


# ---------------------------------------------------------------------------
# duality and coproduct


def duality_pairing_value(L: _Letters, cy: CYStructure, chain_word, cochain_key) -> Fraction:
    """<p_0, F(p_1 .. p_{n-1})> for a chain word and a basis cochain."""
    a, path, e = cochain_key
    if chain_word[1:] != path:
        return Fraction(0)
    p0 = chain_word[0]
    if L.src[p0] != L.tgt[path[-1]] if path else L.src[p0] != a:
        return Fraction(0)
    v = cy.pairing.get((p0, e), 0)
    if not v:
        return Fraction(0)
    # Koszul sign for moving p_0 past the suspended path
    s_path = sum(L.sdeg[x] for x in path)
    sign = (L.deg[p0] * s_path) % 2
    return Fraction(-v if sign else v)


@dataclass
class DualityReport:
    dimension: int
    rows: list  # (i, dim HH_i, dim HH^{d+i}, flag, verdict)

    @property
    def ok(self) -> bool:
        return all(r[4] for r in self.rows if r[3] == COMPLETE)

    def as_dict(self) -> dict:
        return {
            "d": self.dimension,
            "verdict": "pass" if self.ok else "fail",
            "degrees": [
                {"i": i, "HH_i": a, "HH^{d+i}": b, "flag": f, "match": m}
                for i, a, b, f, m in self.rows
            ],
        }


def duality_check(cy: CYStructure, max_len: int, degrees) -> DualityReport:
    """Compare dim HH_i with dim HH^{d+i} on truncation-complete degrees."""
    cat = cy.base
    d = cy.dimension
    chains = build_normalized_complex(cat, max_len)
    cochains = build_cochain_complex(cat, max_len)
    hd = homology_dims(chains.underlying, degrees)
    cd = homology_dims(cochains.underlying, [-(d + i) for i in degrees])
    rows = []
    for i in sorted(degrees):
        a, fa = hd[i]
        b, fb = cd[-(d + i)]
        flag = COMPLETE if fa == fb == COMPLETE else TRUNCATED
        rows.append((i, a, b, flag, a == b))
    return DualityReport(d, rows)


def pairing_matrix_on_homology(cy: CYStructure, chains: HochschildComplex, cochains: CochainComplex,
                               i: int) -> tuple[CohomologyBasis, CohomologyBasis, list[list[Fraction]]]:
    """Pairing between homology bases of HH_i and HH^{d+i}."""
    L = chains.letters
    ucy = _unit_cy(cy, L)
    hb = homology_basis(chains.underlying, i)
    cb = homology_basis(cochains.underlying, -(cy.dimension + i))
    mat = []
    for r in range(hb.dim):
        rep_c = hb.rep(r)
        row = []
        for c in range(cb.dim):
            rep_f = cb.rep(c)
            s = Fraction(0)
            for w, a in rep_c.items():
                for key, b in rep_f.items():
                    v = duality_pairing_value(L, ucy, w, key)
                    if v:
                        s += a * b * v
            row.append(s)
        mat.append(row)
    return hb, cb, mat


def _unit_cy(cy: CYStructure, L: _Letters) -> CYStructure:
    if cy.base is L.cat:
        return cy
    cat2, cy2 = with_unit_basis(cy.base, cy)
    if set(cat2.basis) != set(L.cat.basis):
        raise ValueError("pairing does not match the prepared category")
    return CYStructure(L.cat, cy2.dimension, cy2.pairing)


def chain_pairing_is_natural(cy: CYStructure, max_len: int) -> dict:
    """Check <d c, F> = +- <c, delta F> at chain level on complete degrees.

    Returns per degree the sign that works (+1/-1) or None when neither does.
    """
    chains = build_normalized_complex(cy.base, max_len)
    cochains = build_cochain_complex(cy.base, max_len)
    L = chains.letters
    ucy = _unit_cy(cy, L)
    d = cy.dimension
    cx, cc = chains.underlying, cochains.underlying
    out = {}
    for i in cx.space.degrees():
        if cx.flag(i) != COMPLETE or cx.flag(i - 1) != COMPLETE:
            continue
        # c in C_i, F in C^{d+i-1}: <dc, F> vs <c, delta F>
        j = d + i - 1
        dc = cx.d(i)
        dF = cc.d(-j)
        rows_i = cx.space.basis(i)
        rows_im1 = cx.space.basis(i - 1)
        keys_j = cc.space.basis(-j)
        keys_j1 = cc.space.basis(-(j + 1))
        lhs, rhs = {}, {}
        dcols = dc.columns()
        for ci, w in enumerate(rows_i):
            for fi, key in enumerate(keys_j):
                v = Fraction(0)
                for r, a in dcols[ci].items():
                    v += a * duality_pairing_value(L, ucy, rows_im1[r], key)
                if v:
                    lhs[(ci, fi)] = v
        fcols = dF.columns()
        for ci, w in enumerate(rows_i):
            for fi in range(len(keys_j)):
                v = Fraction(0)
                for r, a in fcols[fi].items():
                    v += a * duality_pairing_value(L, ucy, w, keys_j1[r])
                if v:
                    rhs[(ci, fi)] = v
        if lhs == rhs:
            out[i] = 1
        elif lhs == {k: -v for k, v in rhs.items()}:
            out[i] = -1
        else:
            out[i] = None
    return out


@dataclass
class Coproduct:
    dimension: int
    degrees: list
    bases: dict  # i -> CohomologyBasis of HH_i
    matrices: dict  # i -> {(i1, r1, i2, r2): {r: coeff}} maps basis r of HH_i

    def apply(self, i: int, r: int) -> dict:
        """Coproduct of basis element r of HH_i as {(i1, r1, i2, r2): coeff}."""
        return self.matrices[i][r]


def _h_complete(cx: ChainComplex, k: int) -> bool:
    # homology in degree k sees both neighbours
    return all(cx.flag(j) == COMPLETE for j in (k - 1, k, k + 1))


def coproduct(cy: CYStructure, max_len: int, degrees) -> Coproduct:
    """Dual of the cup product transported through HH_i = (HH^{d+i})^vee.

    Only degree pairs whose cochain degrees are all truncation-complete are
    included.  Raises DualityFailure when the homology pairing is singular.
    """
    d = cy.dimension
    chains = build_normalized_complex(cy.base, max_len)
    cochains = build_cochain_complex(cy.base, max_len)
    cx = chains.underlying
    degrees = sorted(degrees)
    hbases, cbases, pinv = {}, {}, {}
    for i in degrees:
        if not (_h_complete(cx, i) and _h_complete(cochains.underlying, -(d + i))):
            continue
        hb, cb, mat = pairing_matrix_on_homology(cy, chains, cochains, i)
        if hb.dim != cb.dim:
            raise DualityFailure(f"dim HH_{i} = {hb.dim} but dim HH^{d + i} = {cb.dim}")
        m = SparseMatrix.from_dense(mat) if mat else SparseMatrix(0, 0)
        if rank(m) != hb.dim:
            raise DualityFailure(f"pairing HH_{i} x HH^{d + i} is singular")
        hbases[i], cbases[i] = hb, cb
        pinv[i] = _invert(mat)
    usable = sorted(hbases)
    cup = cup_product(cochains, [d + i for i in usable])
    L = chains.letters
    mats = {}
    for i in usable:
        P = _pairing_rows(cy, chains, cochains, hbases[i], cbases[i])
        col = {r: {} for r in range(hbases[i].dim)}
        for i1 in usable:
            i2 = i - d - i1
            if i2 not in hbases:
                continue
            j1, j2, j = d + i1, d + i2, d + i
            for a in range(cbases[i1].dim):
                for b in range(cbases[i2].dim):
                    key = (j1, a, j2, b)
                    if key not in cup.table:
                        continue
                    prod = cup.table[key]  # coordinates in HH^j basis
                    # <c_r, f_a u f_b> = sum_h prod[h] P[r][h]
                    for r in range(hbases[i].dim):
                        val = sum((prod[h] * P[r][h] for h in range(len(prod))), Fraction(0))
                        if not val:
                            continue
                        # expand in dual bases: coefficient of x_{r1} (x) x_{r2}
                        for r1 in range(hbases[i1].dim):
                            w1 = pinv[i1][a][r1]
                            if not w1:
                                continue
                            for r2 in range(hbases[i2].dim):
                                w2 = pinv[i2][b][r2]
                                if w2:
                                    _acc(col[r], (i1, r1, i2, r2), val * w1 * w2)
        mats[i] = col
    return Coproduct(d, usable, hbases, mats)


def coproduct_checks(cp: Coproduct) -> dict:
    """Degree -d and coassociativity, (D (x) 1) D = (1 (x) D) D, on basis vectors.

    A triple (a, b, c) of output degrees is compared only when both
    intermediate degrees a+b+d and b+c+d are in the usable range, since
    otherwise one side is cut off by truncation.
    """
    d = cp.dimension
    usable = set(cp.degrees)
    degree_ok = all(i1 + i2 == i - d for i in cp.degrees for col in cp.matrices[i].values() for (i1, _, i2, _) in col)
    compared = 0
    bad = []
    for i in cp.degrees:
        for r in range(cp.bases[i].dim):
            left: dict = {}
            right: dict = {}
            for (i1, r1, i2, r2), c in cp.apply(i, r).items():
                for (a, ra, b, rb), c2 in cp.apply(i1, r1).items():
                    _acc(left, (a, ra, b, rb, i2, r2), c * c2)
                # D passes the first factor: Koszul sign (-1)^{d i1}
                sgn = -1 if (d * i1) % 2 else 1
                for (b, rb, cc, rc), c2 in cp.apply(i2, r2).items():
                    _acc(right, (i1, r1, b, rb, cc, rc), sgn * c * c2)
            for key in set(left) | set(right):
                a, _, b, _, c, _ = key
                if a + b + d not in usable or b + c + d not in usable:
                    continue
                compared += 1
                if left.get(key, 0) != right.get(key, 0):
                    bad.append({"degree": i, "basis": r, "component": list(key),
                                "left": str(left.get(key, 0)), "right": str(right.get(key, 0))})
    return {"degree_is_minus_d": degree_ok, "coassociative": not bad, "compared": compared,
            "mismatches": bad[:5], "ok": degree_ok and not bad}


def _pairing_rows(cy, chains, cochains, hb, cb):
    L = chains.letters
    ucy = _unit_cy(cy, L)
    P = []
    for r in range(hb.dim):
        rep_c = hb.rep(r)
        row = []
        for c in range(cb.dim):
            rep_f = cb.rep(c)
            s = Fraction(0)
            for w, a in rep_c.items():
                for key, b in rep_f.items():
                    v = duality_pairing_value(L, ucy, w, key)
                    if v:
                        s += a * b * v
            row.append(s)
        P.append(row)
    return P


def _invert(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a square matrix over Q (Gauss-Jordan)."""
    n = len(mat)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]
