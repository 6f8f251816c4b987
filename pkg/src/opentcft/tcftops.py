"""The annulus tensor complex D+(-,1) (x) B and its comparison with Hochschild chains.

A basis element is an annulus ``A(l_0..l_{n-1})`` with a module letter glued
at each open port; letter ``x_i`` sits at port ``i`` (port 0 carries the
basepoint) and must lie in ``Hom(l_{i-1}, l_i)``.  Identity letters away from
the basepoint are zero, since gluing the one-point disc there kills the
annulus.  The differential is the surface boundary of the annulus, reduced
in :mod:`surfcat` and pushed into the letters through the module action, plus
the internal differential of the letters.

The comparison map sends ``A (x) (x_0, .., x_{n-1})`` to the Hochschild word
``(x_0, .., x_{n-1})`` with the sign ``(-1)^{sum (n-1-i)|x_i|}``.  Under this
map the two differentials agree up to the global sign -1 in every degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ainftycy import AInftyCategory, with_unit_basis
from .chaincx import COMPLETE, ChainComplex, GradedSpace, verify_d_squared
from .exactla import SparseMatrix
from .hochschild import HigherMultiplication, build_normalized_complex, connes_B
from .surfcat import SurfaceCategory, _mk, act_on_annulus, port_label

GLOBAL_SIGN = -1


class ComparisonUnavailable(RuntimeError):
    pass


@dataclass
class BimoduleTensorComplex:
    underlying: ChainComplex
    length_bound: int
    category: AInftyCategory
    surface: SurfaceCategory = field(repr=False)
    generators: dict = field(repr=False, default_factory=dict)  # degree -> [(labels, word)]

    def generator_map(self) -> dict:
        """(annulus labels, letters) -> Hochschild word, one entry per basis element."""
        return {g: g[1] for gens in self.generators.values() for g in gens}


def annulus_labels(cat: AInftyCategory, word) -> tuple:
    # port i carries Hom(l_{i-1}, l_i), so l_i is the target of x_i
    return tuple(cat.basis[x].target for x in word)


def psi_sign(cat: AInftyCategory, word) -> int:
    n = len(word)
    e = sum((n - 1 - i) * cat.basis[x].degree for i, x in enumerate(word))
    return -1 if e % 2 else 1


def _units(cat):
    return {cat.unit_basis_name(a) for a in cat.objects}


def _generators(cat: AInftyCategory, max_len: int):
    units = _units(cat)
    for n in range(1, max_len + 1):
        for word in cat.composable_words(n):
            if cat.basis[word[-1]].target != cat.basis[word[0]].source:
                continue
            if any(x in units for x in word[1:]):
                continue
            yield annulus_labels(cat, word), word


def _gen_degree(cat, word) -> int:
    return len(word) - 1 + sum(cat.basis[x].degree for x in word)


class _Boundary:
    """Surface boundary of annuli, cached per label sequence."""

    def __init__(self, sc: SurfaceCategory):
        self.sc = sc
        self._cache: dict = {}

    def terms(self, labels):
        if labels not in self._cache:
            self._cache[labels] = list(self.sc.boundary(self.sc.annulus(labels)).terms.items())
        return self._cache[labels]


def tensor_differential(cat: AInftyCategory, bd: _Boundary, word) -> dict:
    """d(A (x) word) as {word: coeff}; words with an identity letter past port 0 vanish."""
    units = _units(cat)
    out: dict = {}

    def add(w, c):
        if any(x in units for x in w[1:]):
            return
        v = out.get(w, 0) + c
        if v:
            out[w] = v
        else:
            out.pop(w, None)
    labels = annulus_labels(cat, word)
    for dg, c in bd.terms(labels):
        _, vals = act_on_annulus(bd.sc, dg, cat, word)
        for w, v in vals.items():
            add(w, c * v)
    # internal part, (-1)^{|A|} A (x) d(word)
    n = len(word)
    sign = -1 if (n - 1) % 2 else 1
    pre = 0
    for i, x in enumerate(word):
        for y, c in cat.m(1, (x,)).items():
            add(word[:i] + (y,) + word[i + 1:], sign * (-1 if pre % 2 else 1) * c)
        pre += cat.basis[x].degree
    return out


def build_tensor_complex(cat: AInftyCategory, max_len: int, sc: SurfaceCategory | None = None,
                         fault: str | None = None) -> BimoduleTensorComplex:
    """Annuli with at most ``max_len`` ports and letters from the dg category ``cat``."""
    if max_len < 1:
        raise ValueError("length bound must be >= 1")
    if not cat.is_dg():
        raise HigherMultiplication("the tensor complex is built for dg categories")
    cat = with_unit_basis(cat)
    sc = sc or SurfaceCategory(0, fault)
    by_deg: dict[int, list] = {}
    for g in _generators(cat, max_len):
        by_deg.setdefault(_gen_degree(cat, g[1]), []).append(g)
    space = GradedSpace({k: tuple(w for _, w in gs) for k, gs in by_deg.items()})
    bd = _Boundary(sc)
    diffs = {}
    for k, gens in by_deg.items():
        tgt = space.index(k - 1)
        entries = []
        for j, (_, w) in enumerate(gens):
            for v, c in tensor_differential(cat, bd, w).items():
                entries.append((tgt[v], j, c))
        if entries or space.dim(k - 1):
            diffs[k] = SparseMatrix.from_entries(space.dim(k - 1), len(gens), entries)
    # the basis is the normalized word basis, so it truncates in the same degrees
    flags = build_normalized_complex(cat, max_len).underlying.completeness
    return BimoduleTensorComplex(ChainComplex(space, diffs, flags), max_len, cat, sc, by_deg)


def compare_with_hochschild(cat: AInftyCategory, max_len: int, fault: str | None = None) -> dict:
    """Basis bijection plus exact matrix comparison, degree by degree."""
    tc = build_tensor_complex(cat, max_len, fault=fault)
    hc = build_normalized_complex(cat, max_len)
    tcx, hcx = tc.underlying, hc.underlying
    degrees = sorted(set(tcx.degrees()) | set(hcx.degrees()))
    per_degree = {}
    first = None
    ok = True
    for k in degrees:
        tb, hb = tcx.space.basis(k), hcx.space.basis(k)
        complete = hcx.flag(k) == COMPLETE and hcx.flag(k - 1) == COMPLETE
        row = {"dim": len(tb), "flag": hcx.flag(k)}
        if set(tb) != set(hb):
            row["verdict"] = "basis mismatch"
            ok = False
            first = first or {"degree": k, "kind": "basis"}
            per_degree[k] = row
            continue
        # Psi d_T Psi^-1 against GLOBAL_SIGN * d_H, entry by entry
        tlo = tcx.space.basis(k - 1)
        want = {}
        for i, j, v in hcx.d(k).entries():
            want[(hcx.space.basis(k - 1)[i], hb[j])] = v * GLOBAL_SIGN
        got = {}
        for i, j, v in tcx.d(k).entries():
            src, dst = tb[j], tlo[i]
            got[(dst, src)] = v * psi_sign(tc.category, dst) * psi_sign(tc.category, src)
        bad = sorted((key for key in set(want) | set(got) if want.get(key, 0) != got.get(key, 0)),
                     key=repr)
        row["verdict"] = "match" if not bad else "mismatch"
        row["complete"] = complete
        if bad:
            if complete:
                ok = False
            dst, src = bad[0]
            first = first or {"degree": k, "kind": "differential", "source": list(src),
                              "target": list(dst), "expected": str(want.get(bad[0], 0)),
                              "got": str(got.get(bad[0], 0)), "wrap_term": _is_wrap(src, dst)}
        per_degree[k] = row
    return {"ok": ok, "length_bound": max_len, "global_sign": GLOBAL_SIGN,
            "bijection": "A(l_0..l_{n-1}) (x) (x_0..x_{n-1}) -> (-1)^{sum (n-1-i)|x_i|} (x_0..x_{n-1})",
            "per_degree": per_degree, "first_mismatch": first,
            "tensor_d_squared": verify_d_squared(tcx).ok}


def _is_wrap(src, dst) -> bool:
    # the wrap-around term merges the last letter into position 0 and keeps the middle
    return len(dst) == len(src) - 1 and tuple(dst[1:]) == tuple(src[1:-1])


def annulus_B_word(cat: AInftyCategory, sc: SurfaceCategory, word) -> dict:
    """Basepoint rotation: sum over i of (-1)^{i(n-i)} A_{n+1} with the unit disc at port 0.

    The letters are glued starting from ``x_i``, so the freed basepoint port
    receives the identity.
    """
    n = len(word)
    units = _units(cat)
    out: dict = {}
    labels = annulus_labels(cat, word)
    for i in range(n):
        rot = list(range(i, n)) + list(range(i))
        lam = cat.basis[word[i]].source
        new_labels = (lam,) + tuple(labels[j] for j in rot)
        # factors: annulus, one-point disc, copairing; inputs are the old letters
        wires = [(("q", 2, 0), ("p", 0, 0)), (("q", 2, 1), ("p", 1, 0))]
        wires += [(("i", j), ("p", 0, p + 1)) for p, j in enumerate(rot)]
        dg = _mk([("A", new_labels), ("D", (lam,)), ("Q", (lam, lam))], wires,
                 [port_label(labels, j) for j in range(n)], [])
        sgn = -1 if (i * (n - i)) % 2 else 1
        for nf, c in sc.chain(dg).terms.items():
            _, vals = act_on_annulus(sc, nf, cat, word)
            for w, v in vals.items():
                if any(x in units for x in w[1:]):
                    continue
                out[w] = out.get(w, 0) + sgn * c * v
    return {w: c for w, c in out.items() if c}


def b_operator_via_annuli(cat: AInftyCategory, max_len: int, comparison: dict | None = None):
    """B on the tensor complex, transported to Hochschild words.

    Returns {degree: SparseMatrix} on the Hochschild basis, comparable with
    :func:`hochschild.connes_B`.
    """
    comparison = comparison or compare_with_hochschild(cat, max_len)
    if not comparison["ok"]:
        raise ComparisonUnavailable("tensor complex and Hochschild complex do not match")
    tc = build_tensor_complex(cat, max_len)
    hc = build_normalized_complex(cat, max_len)
    ucat, sp = tc.category, hc.underlying.space
    out = {}
    for k in sp.degrees():
        tgt = sp.index(k + 1)
        entries = []
        for j, w in enumerate(sp.basis(k)):
            for v, c in annulus_B_word(ucat, tc.surface, w).items():
                if v in tgt:
                    entries.append((tgt[v], j, c * psi_sign(ucat, v) * psi_sign(ucat, w)))
        out[k] = SparseMatrix.from_entries(sp.dim(k + 1), sp.dim(k), entries)
    return out


def compare_b_operators(cat: AInftyCategory, max_len: int, degrees=None) -> dict:
    """Matrix equality of the annulus B with Connes' B, plus B^2 = 0."""
    comparison = compare_with_hochschild(cat, max_len)
    mine = b_operator_via_annuli(cat, max_len, comparison)
    hc = build_normalized_complex(cat, max_len)
    theirs = connes_B(hc)
    sp = hc.underlying.space
    degrees = sp.degrees() if degrees is None else degrees
    rows = {}
    ok = True
    for k in degrees:
        a = mine.get(k, SparseMatrix(sp.dim(k + 1), sp.dim(k)))
        b = theirs.get(k, SparseMatrix(sp.dim(k + 1), sp.dim(k)))
        nxt = mine.get(k + 1, SparseMatrix(sp.dim(k + 2), sp.dim(k + 1)))
        equal = (a + b.scale(-1)).is_zero()
        sq = (nxt @ a).is_zero()
        ok &= equal and sq
        rows[k] = {"equal": equal, "square_zero": sq}
    return {"ok": ok, "per_degree": rows}

