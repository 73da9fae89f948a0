"""Dense matrices and exact Gaussian elimination over Q(x)."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .field import Chart, DivisionByZeroError, RatFunc

Vector = tuple[RatFunc, ...]


def _pivot_cost(f: RatFunc) -> tuple[int, int]:
    # Prefer constants, then short expressions, to limit expression swell.
    return (0 if f.is_constant() else 1, len(f.num) + len(f.den))


class Matrix:
    """Immutable m x n matrix of :class:`RatFunc` entries."""

    __slots__ = ("chart", "rows", "_hash")

    def __init__(self, chart: Chart, rows: Iterable[Iterable[RatFunc]]):
        self.chart = chart
        self.rows = tuple(tuple(_coerce(chart, e) for e in r) for r in rows)
        width = {len(r) for r in self.rows}
        if len(width) > 1:
            raise ValueError("ragged matrix")
        self._hash = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, chart: Chart, m: int, n: Optional[int] = None) -> "Matrix":
        n = m if n is None else n
        z = chart.zero
        return cls(chart, [[z] * n for _ in range(m)])

    @classmethod
    def identity(cls, chart: Chart, n: int) -> "Matrix":
        return cls(chart, [[chart.one if i == j else chart.zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, chart: Chart, cols: Sequence[Sequence[RatFunc]]) -> "Matrix":
        if not cols:
            raise ValueError("need at least one column")
        return cls(chart, zip(*cols))

    @classmethod
    def parse(cls, chart: Chart, rows: Sequence[Sequence]) -> "Matrix":
        return cls(chart, [[v if isinstance(v, (RatFunc, int, Fraction)) else str(v) for v in row] for row in rows])

    @classmethod
    def block(cls, chart: Chart, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        rows = []
        for brow in blocks:
            for i in range(brow[0].shape[0]):
                rows.append([e for b in brow for e in b.rows[i]])
        return cls(chart, rows)

    # -- shape and access -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij: tuple[int, int]) -> RatFunc:
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.col(j) for j in range(self.shape[1])]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.chart, zip(*self.rows)) if self.rows else self

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.chart, [[self.rows[i][j] for j in cols] for i in rows])

    def map(self, fn) -> "Matrix":
        return Matrix(self.chart, [[fn(e) for e in r] for r in self.rows])

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix(self.chart, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        _same_shape(self, other)
        return Matrix(self.chart, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Matrix":
        return self.map(lambda e: -e)

    def scale(self, f) -> "Matrix":
        return self.map(lambda e: e * f)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.shape[1] != other.shape[0]:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return Matrix(self.chart, [[dot(r, c) for c in cols] for r in self.rows])
        return self.apply(other)

    def apply(self, v: Sequence[RatFunc]) -> Vector:
        if len(v) != self.shape[1]:
            raise ValueError(f"vector of length {len(v)} for matrix of shape {self.shape}")
        return tuple(dot(r, v) for r in self.rows)

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def is_symmetric(self) -> bool:
        m, n = self.shape
        return m == n and all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i))

    def is_antisymmetric(self) -> bool:
        m, n = self.shape
        return m == n and all((self.rows[i][j] + self.rows[j][i]).is_zero() for i in range(n) for j in range(i, n))

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.rows) + "]"

    def __repr__(self) -> str:
        return f"Matrix({self})"

    def to_strings(self) -> list[list[str]]:
        return [[str(e) for e in r] for r in self.rows]

    # -- elimination ------------------------------------------------------

    def det(self) -> RatFunc:
        m, n = self.shape
        if m != n:
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        result = self.chart.one
        for k in range(n):
            piv = _choose_pivot(a, k, k, n)
            if piv is None:
                return self.chart.zero
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                result = -result
            p = a[k][k]
            result = result * p
            inv = p.inverse()
            for i in range(k + 1, n):
                if a[i][k].is_zero():
                    continue
                f = a[i][k] * inv
                a[i] = [a[i][j] - f * a[k][j] if j > k else self.chart.zero for j in range(n)]
        return result

    def rank(self) -> int:
        return len(_row_reduce([list(r) for r in self.rows], self.shape[1])[1])

    def inverse(self) -> "Matrix":
        m, n = self.shape
        if m != n:
            raise ValueError("inverse of a non-square matrix")
        aug = [list(r) + list(e) for r, e in zip(self.rows, Matrix.identity(self.chart, n).rows)]
        red, pivots = _row_reduce(aug, n)
        if len(pivots) < n:
            raise DivisionByZeroError("matrix is singular over Q(x)")
        return Matrix(self.chart, [r[n:] for r in red[:n]])


def _coerce(chart: Chart, v) -> RatFunc:
    if isinstance(v, RatFunc):
        return v
    if isinstance(v, (int, Fraction)):
        return chart.const(v)
    if isinstance(v, str):
        return chart.parse(v)
    raise TypeError(f"cannot use {v!r} as a matrix entry")


def dot(a: Sequence[RatFunc], b: Sequence[RatFunc]) -> RatFunc:
    it = iter(zip(a, b))
    x, y = next(it)
    total = x * y
    for x, y in it:
        if x.num and y.num:
            total = total + x * y
    return total


def _same_shape(a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def _choose_pivot(a: list[list[RatFunc]], col: int, start: int, nrows: int) -> Optional[int]:
    best = None
    best_cost = None
    for i in range(start, nrows):
        e = a[i][col]
        if e.is_zero():
            continue
        cost = _pivot_cost(e)
        if best is None or cost < best_cost:
            best, best_cost = i, cost
    return best


def _row_reduce(a: list[list[RatFunc]], ncols: int) -> tuple[list[list[RatFunc]], list[int]]:
    """Reduced row echelon form on the first ``ncols`` columns (in place)."""
    nrows = len(a)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        piv = _choose_pivot(a, c, r, nrows)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inverse()
        a[r] = [e * inv for e in a[r]]
        for i in range(nrows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def solve(A: Matrix, b: Sequence[RatFunc]) -> Optional[Vector]:
    """A solution of ``A x = b`` over Q(x), or ``None`` if inconsistent.

    When the system is underdetermined, free variables are set to zero.
    """
    m, n = A.shape
    aug = [list(r) + [bi] for r, bi in zip(A.rows, b)]
    red, pivots = _row_reduce(aug, n)
    for row in red[len(pivots):]:
        if not row[n].is_zero():
            return None
    x = [A.chart.zero] * n
    for row, c in zip(red, pivots):
        x[c] = row[n]
    return tuple(x)


def nullspace(A: Matrix) -> list[Vector]:
    """A basis of the right kernel of ``A`` over Q(x)."""
    m, n = A.shape
    if m == 0:
        return [tuple(A.chart.one if i == j else A.chart.zero for i in range(n)) for j in range(n)]
    red, pivots = _row_reduce([list(r) for r in A.rows], n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [A.chart.zero] * n
        v[f] = A.chart.one
        for row, c in zip(red, pivots):
            v[c] = -row[f]
        basis.append(tuple(v))
    return basis


def vadd(a: Sequence[RatFunc], b: Sequence[RatFunc]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence[RatFunc], b: Sequence[RatFunc]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(f, a: Sequence[RatFunc]) -> Vector:
    return tuple(f * x for x in a)


def vneg(a: Sequence[RatFunc]) -> Vector:
    return tuple(-x for x in a)


def vzero(chart: Chart, n: int) -> Vector:
    return (chart.zero,) * n


def vis_zero(a: Sequence[RatFunc]) -> bool:
    return all(x.is_zero() for x in a)


def first_nonzero(a: Sequence[RatFunc]) -> Optional[int]:
    for i, x in enumerate(a):
        if not x.is_zero():
            return i
    return None


def inertia(rows: Sequence[Sequence[Fraction]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a rational symmetric matrix.

    Congruence diagonalization with exact fractions (Sylvester's law).
    """
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    pos = neg = 0
    k = 0
    while k < n:
        size = n - k
        if size == 0:
            break
        # find a nonzero diagonal entry, or create one from an off-diagonal pair
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes a[i][i] = 2 a[i][j] != 0
            for c in range(n):
                a[i][c] += a[j][c]
            for r in range(n):
                a[r][i] += a[r][j]
            piv = i
        a[k], a[piv] = a[piv], a[k]
        for r in a:
            r[k], r[piv] = r[piv], r[k]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for c in range(k, n):
                    a[i][c] -= f * a[k][c]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
            a[i][k] = Fraction(0)
        k += 1
    return pos, neg, n - pos - neg
