"""Finite-dimensional unital A-infinity categories and Calabi-Yau pairings.

Conventions
-----------
Grading is homological and ``m_n`` has degree ``n - 2``.  Composition is
written in diagrammatic order: ``m_2(a, b)`` for ``a : A0 -> A1`` and
``b : A1 -> A2``.  Signs follow the Koszul rule on suspended degrees
``|sx| = |x| + 1``: the suspended operations

    mt_k(sx_1 .. sx_k) = (-1)^{sum_i (k - i) |sx_i|} s m_k(x_1 .. x_k)

all have degree -1 and the A-infinity relations read
``sum mt(1^i (x) mt (x) 1^j) = 0``.  For m_1, m_2 alone this is d^2 = 0,
the Leibniz rule ``d(ab) = (da) b + (-1)^{|a|} a (db)`` and associativity.

Vectors are sparse dicts ``{basis name: Fraction}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .exactla import SparseMatrix, rank

DEFAULT_MAX_ARITY = 6
ARITY_LIMIT = 6


class ArityExceedsBound(ValueError):
    pass


class DegeneratePairing(ValueError):
    pass


class NotAssociative(ValueError):
    pass


class LeibnizFailure(ValueError):
    pass


class InvalidCategory(ValueError):
    pass


def _add_into(acc: dict, vec: dict, coef=1) -> None:
    for k, v in vec.items():
        nv = acc.get(k, 0) + coef * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


@dataclass(frozen=True)
class Basis:
    name: str
    source: str
    target: str
    degree: int


@dataclass
class Violation:
    check: str
    inputs: tuple
    residual: dict

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "inputs": list(self.inputs),
            "residual": {k: str(v) for k, v in sorted(self.residual.items())},
        }


@dataclass
class CheckReport:
    name: str
    violations: list[Violation] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self, limit: int = 5) -> dict:
        return {
            "name": self.name,
            "verdict": "pass" if self.ok else "fail",
            "checked": self.checked,
            "violations": len(self.violations),
            "examples": [v.as_dict() for v in self.violations[:limit]],
        }


class AInftyCategory:
    """Unital A-infinity category with finitely many objects.

    ``mults[n]`` maps a tuple of basis names (a composable word) to the
    output vector of ``m_n``; ``mults[1]`` is the differential.
    """

    def __init__(self, objects, basis: Iterable[Basis], mults: dict, units: dict,
                 max_arity: int = DEFAULT_MAX_ARITY):
        if max_arity > ARITY_LIMIT:
            raise ArityExceedsBound(f"maxArity {max_arity} exceeds supported bound {ARITY_LIMIT}")
        self.objects = tuple(sorted(objects))
        self.basis: dict[str, Basis] = {}
        self.homs: dict[tuple[str, str], list[str]] = {(a, b): [] for a in self.objects for b in self.objects}
        for b in basis:
            if b.name in self.basis:
                raise InvalidCategory(f"duplicate basis name {b.name!r}")
            if (b.source, b.target) not in self.homs:
                raise InvalidCategory(f"unknown objects for {b.name!r}")
            self.basis[b.name] = b
            self.homs[(b.source, b.target)].append(b.name)
        self.max_arity = max_arity
        self.mults: dict[int, dict[tuple, dict]] = {}
        for n, table in mults.items():
            n = int(n)
            if n < 1:
                raise InvalidCategory(f"bad arity {n}")
            if n > max_arity and table:
                raise ArityExceedsBound(f"m_{n} given but maxArity is {max_arity}")
            clean = {}
            for word, out in table.items():
                word = tuple(word)
                if len(word) != n:
                    raise InvalidCategory(f"m_{n} entry with {len(word)} inputs")
                out = {k: Fraction(v) for k, v in out.items() if v}
                if out:
                    clean[word] = out
            if clean:
                self.mults[n] = clean
        self.units = {a: {k: Fraction(v) for k, v in u.items() if v} for a, u in units.items()}
        self._validate_shape()

    # structure ----------------------------------------------------------

    def _validate_shape(self) -> None:
        for a in self.objects:
            if a not in self.units:
                raise InvalidCategory(f"object {a!r} has no unit")
        for n, table in self.mults.items():
            for word, out in table.items():
                for x in word + tuple(out):
                    if x not in self.basis:
                        raise InvalidCategory(f"unknown basis element {x!r} in m_{n}")
                if not self.composable(word):
                    raise InvalidCategory(f"m_{n} defined on non-composable word {word}")
                src, tgt = self.basis[word[0]].source, self.basis[word[-1]].target
                deg = sum(self.basis[x].degree for x in word) + n - 2
                for y in out:
                    b = self.basis[y]
                    if (b.source, b.target) != (src, tgt):
                        raise InvalidCategory(f"m_{n}{word} lands in wrong hom space ({y})")
                    if b.degree != deg:
                        raise InvalidCategory(
                            f"m_{n}{word} is not of degree n-2: output {y} has degree {b.degree}, expected {deg}")

    def degree(self, x: str) -> int:
        return self.basis[x].degree

    def composable(self, word) -> bool:
        return all(self.basis[x].target == self.basis[y].source for x, y in zip(word, word[1:]))

    def hom(self, a: str, b: str, degree: int | None = None) -> list[str]:
        names = self.homs.get((a, b), [])
        if degree is None:
            return list(names)
        return [x for x in names if self.basis[x].degree == degree]

    def is_dg(self) -> bool:
        return all(n <= 2 for n in self.mults)

    def m(self, n: int, word: tuple) -> dict:
        return self.mults.get(n, {}).get(tuple(word), {})

    def m_vec(self, n: int, vecs: list[dict]) -> dict:
        """m_n extended multilinearly to vectors."""
        acc: dict = {}
        for combo in itertools.product(*(v.items() for v in vecs)):
            coef = Fraction(1)
            word = []
            for name, c in combo:
                coef *= c
                word.append(name)
            out = self.m(n, tuple(word))
            if out:
                _add_into(acc, out, coef)
        return acc

    def unit_basis_name(self, a: str) -> str | None:
        u = self.units[a]
        if len(u) == 1:
            (k, v), = u.items()
            if v == 1:
                return k
        return None

    def composable_words(self, n: int, start: str | None = None):
        """All composable basis words of length n (optionally from ``start``)."""
        def rec(prefix, obj):
            if len(prefix) == n:
                yield tuple(prefix)
                return
            for b in self.objects:
                for x in self.homs[(obj, b)]:
                    prefix.append(x)
                    yield from rec(prefix, b)
                    prefix.pop()
        starts = [start] if start is not None else list(self.objects)
        for a in starts:
            yield from rec([], a)

    # suspended operations ------------------------------------------------

    def mt(self, k: int, word: tuple) -> dict:
        """Suspended m_k on a basis word, output as an (unsuspended) vector."""
        out = self.m(k, word)
        if not out:
            return {}
        e = sum((k - 1 - i) * (self.degree(x) + 1) for i, x in enumerate(word))
        if e % 2:
            return {y: -c for y, c in out.items()}
        return out

    def relation_residual(self, word: tuple) -> dict:
        """Left side of the A-infinity relation evaluated on a basis word."""
        n = len(word)
        acc: dict = {}
        pre = 0  # suspended degree of word[:i]
        for i in range(n):
            for k in range(1, n - i + 1):
                if k not in self.mults:
                    continue
                inner = self.mt(k, word[i:i + k])
                if not inner:
                    continue
                sign = -1 if pre % 2 else 1
                for y, c in inner.items():
                    outer = word[:i] + (y,) + word[i + k:]
                    u = n - k + 1
                    if u not in self.mults:
                        continue
                    _add_into(acc, self.mt(u, outer), sign * c)
            pre += self.degree(word[i]) + 1
        return acc


def _word_label(word) -> str:
    return "(" + ",".join(word) + ")"


def check_ainfty_relations(cat: AInftyCategory, up_to: int | None = None) -> CheckReport:
    """Evaluate every A-infinity relation of total arity <= up_to on basis words."""
    if up_to is None:
        up_to = cat.max_arity
    if up_to > cat.max_arity:
        raise ArityExceedsBound(f"requested arity {up_to} > maxArity {cat.max_arity}")
    rep = CheckReport("ainfty_relations")
    for n in range(1, up_to + 1):
        for word in cat.composable_words(n):
            rep.checked += 1
            res = cat.relation_residual(word)
            if res:
                rep.violations.append(Violation(f"arity {n}", word, res))
    return rep


def check_units(cat: AInftyCategory) -> CheckReport:
    """m_2(x, 1) = x = m_2(1, x); m_n with a unit input vanishes for n != 2."""
    rep = CheckReport("units")
    for a in cat.objects:
        u = cat.units[a]
        for x in u:
            b = cat.basis[x]
            if (b.source, b.target) != (a, a) or b.degree != 0:
                rep.violations.append(Violation("unit not in Hom_0(a,a)", (a,), dict(u)))
                break
        dm = cat.m_vec(1, [u]) if 1 in cat.mults else {}
        if dm:
            rep.violations.append(Violation("unit not closed", (a,), dm))
    for x, b in sorted(cat.basis.items()):
        rep.checked += 1
        left = cat.m_vec(2, [cat.units[b.source], {x: Fraction(1)}])
        right = cat.m_vec(2, [{x: Fraction(1)}, cat.units[b.target]])
        for side, got in (("m2(1,x)", left), ("m2(x,1)", right)):
            diff = dict(got)
            _add_into(diff, {x: Fraction(1)}, -1)
            if diff:
                rep.violations.append(Violation(side, (x,), diff))
    for n in range(3, cat.max_arity + 1):
        if n not in cat.mults:
            continue
        for word in cat.composable_words(n - 1):
            # insert a unit at every slot
            objs = [cat.basis[word[0]].source] + [cat.basis[x].target for x in word]
            for j in range(n):
                vecs = [{x: Fraction(1)} for x in word]
                vecs.insert(j, cat.units[objs[j]])
                rep.checked += 1
                out = cat.m_vec(n, vecs)
                if out:
                    rep.violations.append(Violation(f"m_{n} with unit at {j}", word, out))
    return rep


# ---------------------------------------------------------------------------
# Calabi-Yau structures


class CYStructure:
    """Pairings <x, y> for x in Hom(a, b), y in Hom(b, a), of degree d.

    ``pairing`` maps (left name, right name) to a Fraction; only entries with
    ``|x| + |y| = -d`` may be nonzero.
    """

    def __init__(self, base: AInftyCategory, dimension: int, pairing: dict):
        self.base = base
        self.dimension = int(dimension)
        self.pairing: dict[tuple[str, str], Fraction] = {}
        for (x, y), v in pairing.items():
            v = Fraction(v)
            if not v:
                continue
            bx, by = base.basis[x], base.basis[y]
            if (bx.source, bx.target) != (by.target, by.source):
                raise InvalidCategory(f"pairing <{x},{y}> between non-opposite hom spaces")
            if bx.degree + by.degree != -self.dimension:
                raise InvalidCategory(
                    f"pairing <{x},{y}> has degrees {bx.degree}+{by.degree} != -{self.dimension}")
            self.pairing[(x, y)] = v

    def pair(self, u: dict, v: dict) -> Fraction:
        s = Fraction(0)
        for x, a in u.items():
            for y, b in v.items():
                p = self.pairing.get((x, y))
                if p:
                    s += a * b * p
        return s

    def scaled(self, k) -> "CYStructure":
        k = Fraction(k)
        return CYStructure(self.base, self.dimension, {xy: v * k for xy, v in self.pairing.items()})

    def pairing_matrix(self, a: str, b: str, i: int) -> tuple[list[str], list[str], SparseMatrix]:
        rows = self.base.hom(a, b, i)
        cols = self.base.hom(b, a, -self.dimension - i)
        m = SparseMatrix.from_entries(
            len(rows), len(cols),
            ((r, c, self.pairing.get((x, y), 0)) for r, x in enumerate(rows) for c, y in enumerate(cols)))
        return rows, cols, m

    def trace(self, x: dict, a: str) -> Fraction:
        return self.pair(x, self.base.units[a])


def check_nondegenerate(cy: CYStructure) -> CheckReport:
    """Each Hom_i(a,b) x Hom_{-d-i}(b,a) pairing matrix is square and invertible."""
    rep = CheckReport("nondegenerate")
    cat = cy.base
    for a in cat.objects:
        for b in cat.objects:
            degs = {cat.degree(x) for x in cat.hom(a, b)} | {-cy.dimension - cat.degree(y) for y in cat.hom(b, a)}
            for i in sorted(degs):
                rows, cols, m = cy.pairing_matrix(a, b, i)
                rep.checked += 1
                r = rank(m)
                if not (len(rows) == len(cols) == r):
                    rep.violations.append(Violation(
                        "degenerate block", (a, b, i),
                        {"rows": Fraction(len(rows)), "cols": Fraction(len(cols)), "rank": Fraction(r)}))
    return rep


def check_pairing_symmetric(cy: CYStructure) -> CheckReport:
    """<x, y> = (-1)^{|x||y|} <y, x> and the pairing is closed under m_1."""
    rep = CheckReport("pairing_symmetric")
    cat = cy.base
    names = sorted(cat.basis)
    for x in names:
        for y in names:
            bx, by = cat.basis[x], cat.basis[y]
            if (bx.source, bx.target) != (by.target, by.source):
                continue
            rep.checked += 1
            s = -1 if (bx.degree * by.degree) % 2 else 1
            lhs = cy.pairing.get((x, y), 0)
            rhs = s * cy.pairing.get((y, x), 0)
            if lhs != rhs:
                rep.violations.append(Violation("symmetry", (x, y), {"lhs": Fraction(lhs), "rhs": Fraction(rhs)}))
            if 1 in cat.mults:
                sx = -1 if bx.degree % 2 else 1
                closed = cy.pair(cat.m(1, (x,)), {y: 1}) + sx * cy.pair({x: 1}, cat.m(1, (y,)))
                if closed:
                    rep.violations.append(Violation("closedness", (x, y), {"value": closed}))
    return rep


def check_cyclic(cy: CYStructure, up_to: int | None = None) -> CheckReport:
    """Cyclic symmetry of <m_{n-1}(a_0..a_{n-2}), a_{n-1}> for arities <= up_to.

    The sign is (-1)^{(n+1) + |a_0| (|a_1| + ... + |a_{n-1}|)}.
    """
    nd = check_nondegenerate(cy)
    if not nd.ok:
        raise DegeneratePairing(f"pairing is degenerate: {nd.violations[0].inputs}")
    cat = cy.base
    if up_to is None:
        up_to = cat.max_arity
    if up_to > cat.max_arity:
        raise ArityExceedsBound(f"requested arity {up_to} > maxArity {cat.max_arity}")
    rep = CheckReport("cyclic")
    for k in range(1, up_to + 1):
        if k not in cat.mults:
            continue
        n = k + 1
        for path in cat.composable_words(k):
            a0 = cat.basis[path[0]].source
            an = cat.basis[path[-1]].target
            for last in cat.hom(an, a0):
                word = path + (last,)
                rep.checked += 1
                lhs = cy.pair(cat.m(k, path), {last: 1})
                degs = [cat.degree(x) for x in word]
                e = (n + 1) + degs[0] * sum(degs[1:])
                rhs = cy.pair(cat.m(k, word[1:]), {word[0]: 1})
                if e % 2:
                    rhs = -rhs
                if lhs != rhs:
                    rep.violations.append(Violation(f"arity {k}", word, {"lhs": lhs, "rhs": rhs}))
    return rep


# ---------------------------------------------------------------------------
# construction helpers


def from_dg_category(objects, basis: Iterable[Basis], composition: dict, differential: dict,
                     units: dict, max_arity: int = DEFAULT_MAX_ARITY) -> AInftyCategory:
    """Wrap a dg category as an A-infinity category with m_n = 0 for n >= 3.

    Raises NotAssociative / LeibnizFailure when the data is not a dg category
    (the check also covers d^2 = 0, reported as a Leibniz failure).
    """
    cat = AInftyCategory(objects, basis, {1: differential, 2: composition}, units, max_arity=max(max_arity, 3))
    for word in cat.composable_words(3):
        a, b, c = ({x: Fraction(1)} for x in word)
        left = cat.m_vec(2, [cat.m_vec(2, [a, b]), c])
        right = cat.m_vec(2, [a, cat.m_vec(2, [b, c])])
        if left != right:
            raise NotAssociative(f"(xy)z != x(yz) on {word}")
    for x in cat.basis:
        dd = cat.m_vec(1, [cat.m(1, (x,))])
        if dd:
            raise LeibnizFailure(f"d^2 != 0 on {x}")
    for word in cat.composable_words(2):
        x, y = word
        lhs = cat.m_vec(1, [cat.m(2, word)])
        rhs = cat.m_vec(2, [cat.m(1, (x,)), {y: Fraction(1)}])
        s = -1 if cat.degree(x) % 2 else 1
        _add_into(rhs, cat.m_vec(2, [{x: Fraction(1)}, cat.m(1, (y,))]), s)
        if lhs != rhs:
            raise LeibnizFailure(f"d(xy) != (dx)y + (-1)^|x| x(dy) on {word}")
    return cat


def with_unit_basis(cat: AInftyCategory, cy: CYStructure | None = None):
    """Change basis so each unit 1_a is itself a basis element.

    For each object whose unit is not already a basis vector, one degree-0
    basis element with nonzero unit coefficient is replaced by the unit.
    Returns the new category (and transported pairing if given).
    """
    replace: dict[str, tuple[str, dict]] = {}  # old name -> (new unit name, unit vector)
    new_units = {}
    for a in cat.objects:
        name = cat.unit_basis_name(a)
        if name is not None:
            new_units[a] = {name: Fraction(1)}
            continue
        u = cat.units[a]
        pivot = min(u)  # deterministic choice
        uname = f"1_{a}"
        while uname in cat.basis:
            uname = "_" + uname
        replace[pivot] = (uname, u)
        new_units[a] = {uname: Fraction(1)}
    if not replace:
        return (cat, cy) if cy is not None else cat

    def to_old(name: str) -> dict:
        for old, (uname, u) in replace.items():
            if name == uname:
                return dict(u)
        return {name: Fraction(1)}

    def to_new(vec: dict) -> dict:
        out: dict = {}
        for k, v in vec.items():
            if k in replace:
                uname, u = replace[k]
                c = u[k]
                # k = (1 - sum_{j != k} u_j j) / c
                _add_into(out, {uname: v / c})
                for j, uj in u.items():
                    if j != k:
                        _add_into(out, {j: -v * uj / c})
            else:
                _add_into(out, {k: v})
        return out

    basis = []
    for name, b in cat.basis.items():
        if name in replace:
            basis.append(Basis(replace[name][0], b.source, b.target, b.degree))
        else:
            basis.append(b)
    new_names = [b.name for b in basis]
    by_name = {b.name: b for b in basis}
    mults = {}
    for n in cat.mults:
        table = {}
        probe = AInftyCategory(cat.objects, basis, {}, new_units, cat.max_arity)
        for word in probe.composable_words(n):
            out = cat.m_vec(n, [to_old(x) for x in word])
            out = to_new(out)
            if out:
                table[word] = out
        mults[n] = table
    new = AInftyCategory(cat.objects, basis, mults, new_units, cat.max_arity)
    if cy is None:
        return new
    pairing = {}
    for x in new_names:
        for y in new_names:
            bx, by = by_name[x], by_name[y]
            if (bx.source, bx.target) != (by.target, by.source):
                continue
            v = cy.pair(to_old(x), to_old(y))
            if v:
                pairing[(x, y)] = v
    return new, CYStructure(new, cy.dimension, pairing)
