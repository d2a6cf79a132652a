"""Exact dense linear algebra over the rationals.

Everything downstream (intertwiner spaces, mesh-category bases, radical
filtrations) reduces to row reduction over Q, so this module keeps to a
small dense matrix class built on fractions.Fraction plus an incremental
echelon container for subspace bookkeeping.  No floats anywhere.
"""
from __future__ import annotations

from fractions import Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QMat:
    """A dense m x n matrix of Fractions with an explicit shape.

    The explicit shape matters: zero-row and zero-column matrices show up
    constantly (morphisms in or out of a zero space at some vertex) and a
    bare list of lists cannot carry the column count of an empty matrix.
    """

    __slots__ = ("m", "n", "rows")

    def __init__(self, m: int, n: int, rows):
        self.m = m
        self.n = n
        self.rows = rows

    @classmethod
    def from_rows(cls, rows, ncols: int | None = None) -> "QMat":
        rows = [[_frac(x) for x in row] for row in rows]
        m = len(rows)
        if m:
            n = len(rows[0])
        else:
            if ncols is None:
                raise ValueError("ncols required for a 0-row matrix")
            n = ncols
        for row in rows:
            if len(row) != n:
                raise ValueError("ragged rows")
        return cls(m, n, rows)

    @classmethod
    def zeros(cls, m: int, n: int) -> "QMat":
        zero = Fraction(0)
        return cls(m, n, [[zero] * n for _ in range(m)])

    @classmethod
    def identity(cls, n: int) -> "QMat":
        rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls(n, n, rows)

    @property
    def shape(self):
        return (self.m, self.n)

    def copy(self) -> "QMat":
        return QMat(self.m, self.n, [row[:] for row in self.rows])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QMat)
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        return "QMat(%dx%d, %r)" % (self.m, self.n, self.rows)

    def __add__(self, other: "QMat") -> "QMat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in +")
        return QMat(
            self.m,
            self.n,
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
        )

    def __sub__(self, other: "QMat") -> "QMat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in -")
        return QMat(
            self.m,
            self.n,
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
        )

    def scale(self, c) -> "QMat":
        c = _frac(c)
        return QMat(self.m, self.n, [[c * x for x in row] for row in self.rows])

    def __neg__(self) -> "QMat":
        return self.scale(-1)

    def __mul__(self, other: "QMat") -> "QMat":
        if not isinstance(other, QMat):
            return NotImplemented
        if self.n != other.m:
            raise ValueError(
                "shape mismatch in *: %s vs %s" % (self.shape, other.shape)
            )
        bt = other.transpose().rows
        out = []
        for row in self.rows:
            out.append(
                [
                    sum((a * b for a, b in zip(row, col)), Fraction(0))
                    for col in bt
                ]
            )
        return QMat(self.m, other.n, out)

    def apply(self, vec) -> list[Fraction]:
        """Matrix times column vector."""
        if len(vec) != self.n:
            raise ValueError("vector length mismatch")
        vec = [_frac(x) for x in vec]
        return [
            sum((a * b for a, b in zip(row, vec)), Fraction(0))
            for row in self.rows
        ]

    def transpose(self) -> "QMat":
        return QMat(
            self.n,
            self.m,
            [[self.rows[i][j] for i in range(self.m)] for j in range(self.n)],
        )

    @staticmethod
    def hstack(blocks: list["QMat"]) -> "QMat":
        if not blocks:
            raise ValueError("empty hstack")
        m = blocks[0].m
        for b in blocks:
            if b.m != m:
                raise ValueError("row mismatch in hstack")
        rows = [sum((b.rows[i] for b in blocks), []) for i in range(m)]
        return QMat(m, sum(b.n for b in blocks), rows)

    @staticmethod
    def vstack(blocks: list["QMat"]) -> "QMat":
        if not blocks:
            raise ValueError("empty vstack")
        n = blocks[0].n
        for b in blocks:
            if b.n != n:
                raise ValueError("column mismatch in vstack")
        rows = []
        for b in blocks:
            rows.extend(row[:] for row in b.rows)
        return QMat(sum(b.m for b in blocks), n, rows)

    @staticmethod
    def block_diag(blocks: list["QMat"]) -> "QMat":
        m = sum(b.m for b in blocks)
        n = sum(b.n for b in blocks)
        out = QMat.zeros(m, n)
        i0 = 0
        j0 = 0
        for b in blocks:
            for i in range(b.m):
                out.rows[i0 + i][j0 : j0 + b.n] = [x for x in b.rows[i]]
            i0 += b.m
            j0 += b.n
        return out

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    def rref(self):
        """Reduced row echelon form; returns (matrix, pivot column list)."""
        rows = [row[:] for row in self.rows]
        pivots = []
        r = 0
        for c in range(self.n):
            pivot_row = None
            for i in range(r, self.m):
                if rows[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = 1 / rows[r][c]
            rows[r] = [x * inv for x in rows[r]]
            for i in range(self.m):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
            pivots.append(c)
            r += 1
            if r == self.m:
                break
        return QMat(self.m, self.n, rows), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[list[Fraction]]:
        """Canonical kernel basis, one vector per free column."""
        r, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.n) if c not in pivot_set]
        basis = []
        for fc in free:
            v = [Fraction(0)] * self.n
            v[fc] = Fraction(1)
            for i, pc in enumerate(pivots):
                v[pc] = -r.rows[i][fc]
            basis.append(v)
        return basis

    def solve(self, b) -> list[Fraction] | None:
        """One solution of self * x = b, or None if inconsistent."""
        if len(b) != self.m:
            raise ValueError("rhs length mismatch")
        aug = QMat(
            self.m,
            self.n + 1,
            [row[:] + [_frac(bv)] for row, bv in zip(self.rows, b)],
        )
        r, pivots = aug.rref()
        if self.n in pivots:
            return None
        x = [Fraction(0)] * self.n
        for i, pc in enumerate(pivots):
            x[pc] = r.rows[i][self.n]
        return x

    def inverse(self) -> "QMat | None":
        if self.m != self.n:
            raise ValueError("inverse of non-square matrix")
        aug = QMat.hstack([self, QMat.identity(self.n)])
        r, pivots = aug.rref()
        if pivots != list(range(self.n)):
            return None
        return QMat(self.n, self.n, [row[self.n :] for row in r.rows])


class Echelon:
    """An incrementally grown subspace of Q^width in reduced echelon form.

    Rows are kept fully reduced with pivot columns increasing, so two equal
    subspaces always produce identical `rows` lists - handy for canonical
    bases and determinism tests.
    """

    __slots__ = ("width", "rows", "pivots")

    def __init__(self, width: int):
        self.width = width
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec) -> list[Fraction]:
        """Residue of vec modulo the current row space (new list)."""
        if len(vec) != self.width:
            raise ValueError("vector width mismatch")
        v = [_frac(x) for x in vec]
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        return all(x == 0 for x in self.reduce(vec))

    def add(self, vec) -> bool:
        """Insert vec; returns True when it enlarged the span."""
        v = self.reduce(vec)
        pivot = None
        for j, x in enumerate(v):
            if x != 0:
                pivot = j
                break
        if pivot is None:
            return False
        inv = 1 / v[pivot]
        v = [x * inv for x in v]
        for i in range(len(self.rows)):
            f = self.rows[i][pivot]
            if f != 0:
                self.rows[i] = [a - f * b for a, b in zip(self.rows[i], v)]
        at = 0
        while at < len(self.pivots) and self.pivots[at] < pivot:
            at += 1
        self.rows.insert(at, v)
        self.pivots.insert(at, pivot)
        return True

    def extend(self, vectors) -> None:
        for v in vectors:
            self.add(v)

    def copy(self) -> "Echelon":
        e = Echelon(self.width)
        e.rows = [row[:] for row in self.rows]
        e.pivots = self.pivots[:]
        return e

    def basis(self) -> list[list[Fraction]]:
        return [row[:] for row in self.rows]
