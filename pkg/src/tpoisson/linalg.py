"""Exact dense linear algebra over the rationals.

Matrices are immutable row-major tuples of ``Fraction``.  Vectors are plain
tuples.  Pivoting is deterministic: columns are scanned left to right and the
pivot row is the first remaining row with a nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction
RatVector = tuple  # tuple[Fraction, ...]


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction.

    Floats are refused since they cannot carry exact data.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def vec(values: Iterable) -> RatVector:
    return tuple(as_rational(v) for v in values)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(as_rational(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RatMatrix":
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Sequence) -> "RatMatrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> RatVector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> RatVector:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[RatVector]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            ocols = other.columns()
            return RatMatrix.from_rows(
                [[dot(self.row(i), c) for c in ocols] for i in range(self.rows)], other.cols)
        other = tuple(other)
        if len(other) != self.cols:
            raise ValueError("shape mismatch")
        return tuple(dot(self.row(i), other) for i in range(self.rows))

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "RatMatrix":
        c = as_rational(c)
        return RatMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return RatMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RatMatrix":
        return RatMatrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_skew(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == -self[j, i] for i in range(self.rows) for j in range(i, self.cols))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i + 1, self.cols))


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _rref(rows: list[list[Fraction]], ncols: int) -> list[int]:
    """Reduce ``rows`` in place to reduced row echelon form; return pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(M: RatMatrix) -> int:
    return len(_rref(M.to_rows(), M.cols))


def kernel(M: RatMatrix) -> list[RatVector]:
    """Basis of the right null space, one vector per free column."""
    rows = M.to_rows()
    pivots = _rref(rows, M.cols)
    basis = []
    for f in (c for c in range(M.cols) if c not in pivots):
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(tuple(v))
    return basis


def solve_affine(M: RatMatrix, b: Sequence) -> RatVector | None:
    """One solution of ``M v = b`` with free variables set to zero, or None."""
    b = vec(b)
    if len(b) != M.rows:
        raise ValueError("right-hand side length must equal the row count")
    rows = [r + [b[i]] for i, r in enumerate(M.to_rows())]
    pivots = _rref(rows, M.cols)
    if any(all(x == 0 for x in r[:-1]) and r[-1] != 0 for r in rows):
        return None
    v = [Fraction(0)] * M.cols
    for r, p in enumerate(pivots):
        v[p] = rows[r][-1]
    return tuple(v)


def inverse(M: RatMatrix) -> RatMatrix:
    if M.rows != M.cols:
        raise ValueError("matrix is not square")
    n = M.rows
    rows = [r + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.to_rows())]
    if len(_rref(rows, n)) < n:
        raise ZeroDivisionError("matrix is singular")
    return RatMatrix.from_rows([r[n:] for r in rows], n)


def lp_max(objective: Sequence, A: Sequence[Sequence], b: Sequence) -> Fraction | None:
    """Maximize ``objective . x`` over ``A x <= b, x >= 0`` with ``b >= 0``.

    Exact tableau simplex with Bland's rule; the origin is feasible because
    ``b >= 0``.  Returns None when the objective is unbounded.
    """
    m, k = len(A), len(objective)
    b = vec(b)
    if any(x < 0 for x in b):
        raise ValueError("right-hand side must be nonnegative")
    tab = [vec(A[i]) + tuple(Fraction(int(i == j)) for j in range(m)) + (b[i],) for i in range(m)]
    tab = [list(r) for r in tab]
    obj = [-x for x in vec(objective)] + [Fraction(0)] * (m + 1)
    basis = [k + i for i in range(m)]
    while True:
        enter = next((j for j in range(k + m) if obj[j] < 0), None)
        if enter is None:
            return obj[-1]
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return None
        i = best[1]
        piv = tab[i][enter]
        tab[i] = [x / piv for x in tab[i]]
        for r in range(m):
            if r != i and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [x - f * y for x, y in zip(tab[r], tab[i])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, tab[i])]
        basis[i] = enter


def solve_integer(M: Sequence[Sequence[int]], b: Sequence[int]) -> tuple | None:
    """An integer solution of ``M v = b`` for an integer matrix, or None.

    Column Hermite reduction: unimodular column operations bring M to lower
    echelon form H = M U, then H y = b is solved by forward substitution.
    """
    H = [list(map(int, r)) for r in M]
    s = len(H)
    n = len(H[0]) if H else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst, src, f):
        # column dst -= f * column src
        for row in H:
            row[dst] -= f * row[src]
        for row in U:
            row[dst] -= f * row[src]

    def swap(a, c):
        for row in H:
            row[a], row[c] = row[c], row[a]
        for row in U:
            row[a], row[c] = row[c], row[a]

    pivots = []
    col = 0
    for i in range(s):
        if col == n:
            break
        while True:
            nz = [c for c in range(col, n) if H[i][c] != 0]
            if not nz:
                break
            c0 = min(nz, key=lambda c: abs(H[i][c]))
            swap(col, c0)
            done = True
            for c in range(col + 1, n):
                if H[i][c]:
                    colop(c, col, H[i][c] // H[i][col])
                    if H[i][c]:
                        done = False
            if done:
                break
        if any(H[i][c] for c in range(col, n)):
            pivots.append((i, col))
            col += 1
    y = [0] * n
    piv_of_row = dict(pivots)
    for i in range(s):
        rest = b[i] - sum(H[i][j] * y[j] for j in range(n))
        if i in piv_of_row:
            p = piv_of_row[i]
            rest += H[i][p] * y[p]
            if rest % H[i][p]:
                return None
            y[p] = rest // H[i][p]
        elif rest:
            return None
    return tuple(sum(U[r][j] * y[j] for j in range(n)) for r in range(n))


def solve_mod2(M: Sequence[Sequence[int]], b: Sequence[int]) -> tuple | None:
    """A solution of ``M v = b`` over GF(2), or None."""
    n = len(M[0]) if M else 0
    rows = [[x % 2 for x in r] + [b[i] % 2] for i, r in enumerate(M)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                rows[i] = [x ^ y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(not any(row[:-1]) and row[-1] for row in rows):
        return None
    v = [0] * n
    for i, c in enumerate(pivots):
        v[c] = rows[i][-1]
    return tuple(v)
