"""Integer-graded chain complexes over Q (differential of degree -1)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable

from .exactla import SparseMatrix, kernel_basis, rank

COMPLETE = "complete"
TRUNCATED = "truncated"


class NotAComplex(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    """Finite-dimensional graded space: degree -> ordered basis labels."""

    components: dict[int, tuple[Hashable, ...]]

    def __post_init__(self):
        comps = {}
        for k, basis in self.components.items():
            basis = tuple(basis)
            if len(set(basis)) != len(basis):
                raise ValueError(f"duplicate basis labels in degree {k}")
            if basis:
                comps[int(k)] = basis
        object.__setattr__(self, "components", comps)

    def dim(self, k: int) -> int:
        return len(self.components.get(k, ()))

    def basis(self, k: int) -> tuple:
        return self.components.get(k, ())

    def degrees(self) -> list[int]:
        return sorted(self.components)

    def index(self, k: int) -> dict:
        return {b: i for i, b in enumerate(self.basis(k))}


@dataclass
class ChainComplex:
    """Chain complex with sparse differentials ``d_k : C_k -> C_{k-1}``.

    Degrees absent from ``differentials`` have zero differential.  A degree
    absent from ``completeness`` is complete.
    """

    space: GradedSpace
    differentials: dict[int, SparseMatrix] = field(default_factory=dict)
    completeness: dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        for k, m in self.differentials.items():
            want = (self.space.dim(k - 1), self.space.dim(k))
            if m.shape != want:
                raise ValueError(f"d_{k} has shape {m.shape}, expected {want}")

    def d(self, k: int) -> SparseMatrix:
        m = self.differentials.get(k)
        if m is None:
            return SparseMatrix(self.space.dim(k - 1), self.space.dim(k))
        return m

    def flag(self, k: int) -> str:
        return self.completeness.get(k, COMPLETE)

    def degrees(self) -> list[int]:
        return self.space.degrees()


@dataclass
class DSquaredReport:
    ok: bool
    degree: int | None = None
    entry: tuple[int, int, Fraction] | None = None

    def as_dict(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            r, c, v = self.entry
            out.update(degree=self.degree, entry=[r, c, str(v)])
        return out


def verify_d_squared(c: ChainComplex, degrees: Iterable[int] | None = None) -> DSquaredReport:
    """Check d_{k-1} d_k = 0, reporting the first failing degree."""
    if degrees is None:
        degs = sorted(set(c.differentials) | set(c.degrees()))
    else:
        degs = sorted(degrees)
    for k in degs:
        prod = c.d(k - 1) @ c.d(k)
        if not prod.is_zero():
            return DSquaredReport(False, k, next(prod.entries()))
    return DSquaredReport(True)


def homology_dims(c: ChainComplex, degrees: Iterable[int]) -> dict[int, tuple[int, str]]:
    """dim H_k = dim ker d_k - rank d_{k+1}, with completeness flags.

    A degree is reported truncated when it or either neighbour is truncated.
    """
    degrees = sorted(set(degrees))
    if not degrees:
        return {}
    lo, hi = degrees[0], degrees[-1]
    rep = verify_d_squared(c, range(lo, hi + 2))
    if not rep.ok:
        raise NotAComplex(f"d^2 != 0 at degree {rep.degree}: entry {rep.entry}")
    ranks: dict[int, int] = {}

    def rk(k):
        if k not in ranks:
            ranks[k] = rank(c.d(k))
        return ranks[k]

    out = {}
    for k in degrees:
        dim = c.space.dim(k) - rk(k) - rk(k + 1)
        flags = {c.flag(k - 1), c.flag(k), c.flag(k + 1)}
        out[k] = (dim, TRUNCATED if TRUNCATED in flags else COMPLETE)
    return out


def cycles(c: ChainComplex, k: int) -> list[dict[int, Fraction]]:
    return kernel_basis(c.d(k))


def boundaries(c: ChainComplex, k: int) -> list[dict[int, Fraction]]:
    return [col for col in c.d(k + 1).columns() if col]


def dual_complex(c: ChainComplex) -> ChainComplex:
    """Linear dual: C^vee_{-k} = (C_k)^vee with d^vee_{1-k} = (-1)^k d_k^T.

    This is the Koszul sign for f -> -(-1)^{|f|} f o d.  Dualising twice
    returns the original spaces with every differential negated, which is
    isomorphic to the original and has the same homology.
    """
    comps = {-k: tuple(("dual", b) for b in c.space.basis(k)) for k in c.degrees()}
    space = GradedSpace(comps)
    diffs = {}
    for k, m in c.differentials.items():
        # d_k : C_k -> C_{k-1} dualises to C^vee_{1-k} -> C^vee_{-k}
        diffs[1 - k] = m.transpose().scale(-1 if k % 2 else 1)
    flags = {-k: f for k, f in c.completeness.items()}
    return ChainComplex(space, diffs, flags)


def euler_characteristic(c: ChainComplex) -> int:
    return sum((-1) ** (k % 2) * c.space.dim(k) for k in c.degrees())
