"""Exact sparse linear algebra over the rationals.

Matrices are stored row-major as ``{row: {col: Fraction}}`` with no stored
zeros.  Elimination picks pivots Markowitz-style (fewest entries in the pivot
column, then fewest in the pivot row) to keep fill-in and fraction growth
down on the block-sparse matrices produced by tensor-word complexes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

Rational = Fraction


class SubspaceNotContained(ValueError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a Fraction.

    >>> parse_rational("-3/6")
    Fraction(-1, 2)
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    s = text.strip()
    if "/" in s:
        p, q = s.split("/", 1)
        num, den = int(p), int(q)
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(num, den)
    return Fraction(int(s))


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class SparseMatrix:
    """A rows x cols matrix over Q with sparse row storage."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        self.rows = rows
        self.cols = cols
        self.data: dict[int, dict[int, Fraction]] = {}
        if data:
            for r, row in data.items():
                for c, v in row.items():
                    self._add(r, c, v)

    # construction -------------------------------------------------------

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable) -> "SparseMatrix":
        """Build from (row, col, value) triples; repeated positions are summed."""
        m = cls(rows, cols)
        for r, c, v in entries:
            m._add(r, c, v)
        return m

    @classmethod
    def from_dense(cls, rows_list) -> "SparseMatrix":
        rows_list = [list(r) for r in rows_list]
        nr = len(rows_list)
        nc = len(rows_list[0]) if nr else 0
        m = cls(nr, nc)
        for i, row in enumerate(rows_list):
            if len(row) != nc:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                if v:
                    m._add(i, j, v)
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.from_entries(n, n, ((i, i, 1) for i in range(n)))

    @classmethod
    def from_columns(cls, rows: int, columns) -> "SparseMatrix":
        """Columns given as dicts ``{row: value}``."""
        columns = list(columns)
        m = cls(rows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                m._add(i, j, v)
        return m

    def _add(self, r: int, c: int, v) -> None:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
        v = Fraction(v)
        if not v:
            return
        row = self.data.setdefault(r, {})
        new = row.get(c, 0) + v
        if new:
            row[c] = new
        else:
            del row[c]
            if not row:
                del self.data[r]

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, pos) -> Fraction:
        r, c = pos
        return self.data.get(r, {}).get(c, Fraction(0))

    def entries(self) -> Iterator[tuple[int, int, Fraction]]:
        """Nonzero entries in (row, col) order."""
        for r in sorted(self.data):
            row = self.data[r]
            for c in sorted(row):
                yield r, c, row[c]

    def nnz(self) -> int:
        return sum(len(row) for row in self.data.values())

    def is_zero(self) -> bool:
        return not self.data

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, c, v in self.entries():
            out[r][c] = v
        return out

    def column(self, j: int) -> dict[int, Fraction]:
        return {r: row[j] for r, row in self.data.items() if j in row}

    def columns(self) -> list[dict[int, Fraction]]:
        cols: list[dict[int, Fraction]] = [{} for _ in range(self.cols)]
        for r, row in self.data.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    # algebra ------------------------------------------------------------

    def transpose(self) -> "SparseMatrix":
        t = SparseMatrix(self.cols, self.rows)
        for r, row in self.data.items():
            for c, v in row.items():
                t.data.setdefault(c, {})[r] = v
        return t

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __neg__(self) -> "SparseMatrix":
        return self.scale(-1)

    def scale(self, k) -> "SparseMatrix":
        k = Fraction(k)
        out = SparseMatrix(self.rows, self.cols)
        if k:
            out.data = {r: {c: v * k for c, v in row.items()} for r, row in self.data.items()}
        return out

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        out = SparseMatrix(self.rows, self.cols)
        out.data = {r: dict(row) for r, row in self.data.items()}
        for r, c, v in other.entries():
            out._add(r, c, v)
        return out

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = SparseMatrix(self.rows, other.cols)
        for r, row in self.data.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                orow = other.data.get(k)
                if not orow:
                    continue
                for c, b in orow.items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out.data[r] = acc
        return out

    def apply(self, vec: dict[int, Fraction]) -> dict[int, Fraction]:
        """Matrix times a sparse column vector ``{index: value}``."""
        out: dict[int, Fraction] = {}
        for r, row in self.data.items():
            s = Fraction(0)
            for c, a in row.items():
                v = vec.get(c)
                if v:
                    s += a * v
            if s:
                out[r] = s
        return out

    def submatrix(self, rows: list[int], cols: list[int]) -> "SparseMatrix":
        rpos = {r: i for i, r in enumerate(rows)}
        cpos = {c: j for j, c in enumerate(cols)}
        out = SparseMatrix(len(rows), len(cols))
        for r, row in self.data.items():
            i = rpos.get(r)
            if i is None:
                continue
            for c, v in row.items():
                j = cpos.get(c)
                if j is not None:
                    out.data.setdefault(i, {})[j] = v
        return out

    def hstack(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        out = SparseMatrix(self.rows, self.cols + other.cols)
        out.data = {r: dict(row) for r, row in self.data.items()}
        for r, row in other.data.items():
            tgt = out.data.setdefault(r, {})
            for c, v in row.items():
                tgt[c + self.cols] = v
        return out

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


# ---------------------------------------------------------------------------
# elimination


def _eliminate(rows: dict[int, dict[int, Fraction]], ncols: int):
    """Sparse Gaussian elimination in place on a dict of row dicts.

    Returns the list of pivots ``(row_id, col)`` in elimination order; the
    pivot rows are left normalised (pivot entry 1) and every other surviving
    row has a zero in each earlier pivot column.  Rows are consumed.
    """
    col_rows: dict[int, set[int]] = {}
    for r, row in rows.items():
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    pivots: list[tuple[int, int, dict[int, Fraction]]] = []
    active = set(rows)
    while col_rows:
        # Markowitz: sparsest column, then sparsest row within it
        c = min(col_rows, key=lambda k: (len(col_rows[k]), k))
        cand = col_rows[c]
        r = min(cand, key=lambda k: (len(rows[k]), k))
        prow = rows.pop(r)
        active.discard(r)
        inv = 1 / prow[c]
        if inv != 1:
            prow = {k: v * inv for k, v in prow.items()}
        for k in prow:
            col_rows[k].discard(r)
        for other in list(col_rows[c]):
            orow = rows[other]
            f = orow[c]
            for k, v in prow.items():
                nv = orow.get(k, 0) - f * v
                if nv:
                    if k not in orow:
                        col_rows.setdefault(k, set()).add(other)
                    orow[k] = nv
                else:
                    if k in orow:
                        del orow[k]
                        col_rows[k].discard(other)
        for k in list(prow):
            if not col_rows.get(k, True):
                del col_rows[k]
        col_rows.pop(c, None)
        pivots.append((r, c, prow))
    return pivots


def rank(m: SparseMatrix) -> int:
    """Rank over Q."""
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    # eliminate along the shorter dimension's rows
    src = m if m.rows <= m.cols else m.transpose()
    rows = {r: dict(row) for r, row in src.data.items()}
    return len(_eliminate(rows, src.cols))


def rref_rows(m: SparseMatrix) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form: (rows, pivot columns), pivots ascending."""
    rows = {r: dict(row) for r, row in m.data.items()}
    pivots = _eliminate(rows, m.cols)
    # back-substitute so each pivot column is a unit vector
    pivots.sort(key=lambda t: t[1])
    by_col = {c: prow for _, c, prow in pivots}
    order = [c for _, c, _ in pivots]
    for c in reversed(order):
        prow = by_col[c]
        for c2 in order:
            if c2 == c:
                continue
            orow = by_col[c2]
            f = orow.get(c)
            if f:
                for k, v in prow.items():
                    nv = orow.get(k, 0) - f * v
                    if nv:
                        orow[k] = nv
                    else:
                        orow.pop(k, None)
    return [by_col[c] for c in order], order


def kernel_basis(m: SparseMatrix) -> list[dict[int, Fraction]]:
    """Basis of {v : m v = 0}, each vector a sparse dict over column indices."""
    red, piv = rref_rows(m)
    pivset = set(piv)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        v = {free: Fraction(1)}
        for row, c in zip(red, piv):
            a = row.get(free)
            if a:
                v[c] = -a
        basis.append(v)
    return basis


def column_space_basis(m: SparseMatrix) -> list[int]:
    """Indices of a maximal independent set of columns (pivot columns)."""
    _, piv = rref_rows(m)
    return piv


def quotient_dim(big: SparseMatrix, sub: SparseMatrix) -> int:
    """dim span(big) - dim span(sub), checking span(sub) lies in span(big)."""
    if big.rows != sub.rows:
        raise ValueError("row count mismatch")
    rb = rank(big)
    if rank(big.hstack(sub)) != rb:
        raise SubspaceNotContained("columns of sub are not in the span of big")
    return rb - rank(sub)


class QuotientCoordinates:
    """Coordinates on span(top) / span(bottom) for subspaces of Q^n.

    ``top`` and ``bottom`` are lists of sparse vectors with span(bottom) a
    subspace of span(top).  ``reps`` are representatives of a basis of the
    quotient, and :meth:`coords` returns the coordinates of a vector of
    span(top) in that basis (raising if the vector is outside span(top)).
    """

    def __init__(self, n: int, top: list[dict], bottom: list[dict]):
        self.n = n
        # reduce bottom, then extend by top
        self._rows: list[tuple[int, dict[int, Fraction], int]] = []
        self._bottom_rank = 0
        self.reps: list[dict[int, Fraction]] = []
        for v in bottom:
            if self._insert(v, None) is not None:
                self._bottom_rank += 1
        for v in top:
            idx = len(self.reps)
            if self._insert(v, idx) is not None:
                self.reps.append({k: Fraction(x) for k, x in v.items() if x})
        for v in bottom:
            if self._reduce(v)[0]:
                raise SubspaceNotContained("bottom not inside top")

    def _reduce(self, v):
        v = {k: Fraction(x) for k, x in v.items() if x}
        tag: dict[int, Fraction] = {}
        for piv, row, label in self._rows:
            a = v.get(piv)
            if not a:
                continue
            for k, x in row.items():
                nv = v.get(k, 0) - a * x
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for k, x in label.items():
                nv = tag.get(k, 0) + a * x
                if nv:
                    tag[k] = nv
                else:
                    tag.pop(k, None)
        return v, tag

    def _insert(self, v, idx):
        rem, tag = self._reduce(v)
        if not rem:
            return None
        piv = min(rem)
        a = rem[piv]
        row = {k: x / a for k, x in rem.items()}
        # label records quotient coordinates carried by this echelon row
        label = {k: -x / a for k, x in tag.items()}
        if idx is not None:
            label[idx] = label.get(idx, 0) + 1 / a
            if not label[idx]:
                del label[idx]
        # keep existing rows reduced against the new pivot
        new_rows = []
        for p, r, lab in self._rows:
            b = r.get(piv)
            if b:
                r = dict(r)
                lab = dict(lab)
                for k, x in row.items():
                    nv = r.get(k, 0) - b * x
                    if nv:
                        r[k] = nv
                    else:
                        r.pop(k, None)
                for k, x in label.items():
                    nv = lab.get(k, 0) - b * x
                    if nv:
                        lab[k] = nv
                    else:
                        lab.pop(k, None)
            new_rows.append((p, r, lab))
        new_rows.append((piv, row, label))
        self._rows = new_rows
        return piv

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, v) -> list[Fraction]:
        rem, tag = self._reduce(v)
        if rem:
            raise SubspaceNotContained("vector not in the top space")
        return [tag.get(i, Fraction(0)) for i in range(len(self.reps))]
