"""Exact linear algebra over Q, plus dual numbers and truncated matrix series.

Everything here works on :class:`fractions.Fraction`.  Matrices are dense and
immutable; the sizes we care about are a few hundred rows at most.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionError, SingularMatrixError

__all__ = [
    "RationalMatrix",
    "KernelBasis",
    "Inconsistency",
    "DualScalar",
    "DualMatrix",
    "MatrixSeries",
    "to_fraction",
    "rref",
    "rank",
    "kernel",
    "solve",
    "dot",
]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use Fraction or str")
    return Fraction(x)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


class RationalMatrix:
    """Dense immutable matrix with Fraction entries, stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Iterable = None):
        if rows < 0 or cols < 0:
            raise DimensionError("matrix shape must be nonnegative")
        if entries is None:
            data = (Fraction(0),) * (rows * cols)
        else:
            data = tuple(to_fraction(x) for x in entries)
        if len(data) != rows * cols:
            raise DimensionError(f"expected {rows * cols} entries, got {len(data)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", data)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("RationalMatrix is immutable")

    # construction helpers

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RationalMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), cols, (x for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(n, n, (1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, values: Sequence) -> "RationalMatrix":
        n = len(values)
        return cls(n, n, (values[i] if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def column(cls, values: Sequence) -> "RationalMatrix":
        return cls(len(values), 1, values)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RationalMatrix":
        if rows is None:
            rows = len(columns[0]) if columns else 0
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], cols=len(columns))

    @classmethod
    def vstack(cls, blocks: Sequence["RationalMatrix"], cols: int) -> "RationalMatrix":
        for b in blocks:
            if b.cols != cols:
                raise DimensionError("vstack: column mismatch")
        return cls(sum(b.rows for b in blocks), cols, (x for b in blocks for x in b.entries))

    @classmethod
    def hstack(cls, blocks: Sequence["RationalMatrix"], rows: int) -> "RationalMatrix":
        for b in blocks:
            if b.rows != rows:
                raise DimensionError("hstack: row mismatch")
        return cls.from_rows(
            [[x for b in blocks for x in b.row(i)] for i in range(rows)],
            cols=sum(b.cols for b in blocks),
        )

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def nonzero_entries(self):
        """Yield ``(i, j, value)`` for nonzero entries in row-major order."""
        c = self.cols
        for k, x in enumerate(self.entries):
            if x:
                yield k // c, k % c, x

    # arithmetic

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.rows, self.cols, self.entries))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"RationalMatrix({self.rows}x{self.cols}: [{body}])"

    def _check_same(self, other: "RationalMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same(other)
        return RationalMatrix(self.rows, self.cols, (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same(other)
        return RationalMatrix(self.rows, self.cols, (a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, (-a for a in self.entries))

    def scale(self, c) -> "RationalMatrix":
        c = to_fraction(c)
        return RationalMatrix(self.rows, self.cols, (c * a for a in self.entries))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [Fraction(0)] * (n * m)
        for i in range(n):
            base = i * m
            for t in range(k):
                x = a[i * k + t]
                if not x:
                    continue
                brow = t * m
                for j in range(m):
                    y = b[brow + j]
                    if y:
                        out[base + j] += x * y
        return RationalMatrix(n, m, out)

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.shape} matrix")
        v = [to_fraction(x) for x in v]
        return tuple(dot(self.row(i), v) for i in range(self.rows))

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    T = property(transpose)

    def kron(self, other: "RationalMatrix") -> "RationalMatrix":
        p, q = other.rows, other.cols
        rows = []
        for i in range(self.rows):
            for k in range(p):
                rows.append([self[i, j] * other[k, l] for j in range(self.cols) for l in range(q)])
        return RationalMatrix.from_rows(rows, cols=self.cols * q)

    def vec(self) -> tuple[Fraction, ...]:
        """Row-major flattening."""
        return self.entries

    @classmethod
    def unvec(cls, values: Sequence, n: int, m: int | None = None) -> "RationalMatrix":
        return cls(n, n if m is None else m, values)

    def rank(self) -> int:
        return rank(self)

    def inverse(self) -> "RationalMatrix":
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        aug = RationalMatrix.hstack([self, RationalMatrix.identity(n)], n)
        red, r, pivots = rref(aug)
        if pivots[:n] != list(range(n)):
            raise SingularMatrixError("matrix is singular")
        return RationalMatrix.from_rows([red.row(i)[n:] for i in range(n)], cols=n)

    def trace(self) -> Fraction:
        return sum((self[i, i] for i in range(min(self.rows, self.cols))), Fraction(0))


# elimination

def _integer_row(row: Sequence[Fraction]) -> list[int]:
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in row), 1)
    ints = [int(x * den) for x in row]
    return _primitive(ints)


def _primitive(ints: list[int]) -> list[int]:
    g = reduce(gcd, ints, 0)
    if g > 1:
        ints = [x // g for x in ints]
    return ints


def rref(M: RationalMatrix) -> tuple[RationalMatrix, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns.

    Rows are kept as primitive integer vectors during elimination (each row is
    divided by the gcd of its entries after every update) and only normalised
    to a leading 1 at the end.  Pivoting is leftmost column, topmost row.
    """
    rows = [_integer_row(M.row(i)) for i in range(M.rows)]
    pivots: list[int] = []
    r = 0
    for c in range(M.cols):
        if r == len(rows):
            break
        sel = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        piv = rows[r]
        p = piv[c]
        for i in range(len(rows)):
            if i == r:
                continue
            a = rows[i][c]
            if a:
                rows[i] = _primitive([p * x - a * y for x, y in zip(rows[i], piv)])
        pivots.append(c)
        r += 1
    out = []
    for i, row in enumerate(rows):
        if i < r:
            lead = row[pivots[i]]
            out.append([Fraction(x, lead) for x in row])
        else:
            out.append([Fraction(0)] * M.cols)
    return RationalMatrix.from_rows(out, cols=M.cols) if M.rows else M, r, pivots


def rank(M: RationalMatrix) -> int:
    return rref(M)[1]


@dataclass(frozen=True)
class KernelBasis:
    dimension: int
    basis_vectors: tuple[tuple[Fraction, ...], ...]

    def as_matrix(self, length: int) -> RationalMatrix:
        """Basis vectors as the columns of a ``length x dimension`` matrix."""
        return RationalMatrix.from_columns(self.basis_vectors, rows=length) if self.dimension else RationalMatrix(length, 0)

    def contains(self, v: Sequence) -> bool:
        """True when ``v`` lies in the span of the basis."""
        if self.dimension == 0:
            return not any(v)
        base = RationalMatrix.from_rows(self.basis_vectors)
        both = RationalMatrix.from_rows(list(self.basis_vectors) + [list(v)])
        return rank(both) == rank(base)


def kernel(M: RationalMatrix) -> KernelBasis:
    red, r, pivots = rref(M)
    pivot_set = set(pivots)
    free = [c for c in range(M.cols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -red[i, f]
        basis.append(tuple(v))
    return KernelBasis(len(basis), tuple(basis))


@dataclass(frozen=True)
class Inconsistency:
    """Certificate that ``M x = target`` has no solution.

    ``row_combination`` is a vector y with ``y M = 0`` and ``y . target = value != 0``.
    """

    row_combination: tuple[Fraction, ...]
    value: Fraction


def solve(M: RationalMatrix, target: Sequence) -> tuple[Fraction, ...] | Inconsistency:
    """Return one solution of ``M x = target``, or an :class:`Inconsistency`.

    The solution is the echelon one: free variables are set to zero.
    """
    if len(target) != M.rows:
        raise DimensionError(f"target of length {len(target)} for {M.rows} rows")
    target = [to_fraction(x) for x in target]
    aug = RationalMatrix.hstack([M, RationalMatrix.column(target)], M.rows)
    red, r, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        for y in kernel(M.transpose()).basis_vectors:
            val = dot(y, target)
            if val:
                return Inconsistency(y, val)
        raise AssertionError("inconsistent system without a left-kernel witness")
    x = [Fraction(0)] * M.cols
    for i, pc in enumerate(pivots):
        x[pc] = red[i, M.cols]
    return tuple(x)


# dual numbers and truncated series

@dataclass(frozen=True)
class DualScalar:
    """``a + eps*b`` with ``eps**2 == 0``."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", to_fraction(self.a))
        object.__setattr__(self, "b", to_fraction(self.b))

    @staticmethod
    def _lift(x) -> "DualScalar":
        return x if isinstance(x, DualScalar) else DualScalar(to_fraction(x))

    def __add__(self, other):
        o = self._lift(other)
        return DualScalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return DualScalar(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    @classmethod
    def eps(cls) -> "DualScalar":
        return cls(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class DualMatrix:
    """Matrix over k[eps]/(eps^2), stored as value part and eps part."""

    value: RationalMatrix
    eps: RationalMatrix

    def __matmul__(self, other: "DualMatrix") -> "DualMatrix":
        return DualMatrix(self.value @ other.value, self.value @ other.eps + self.eps @ other.value)

    def __add__(self, other: "DualMatrix") -> "DualMatrix":
        return DualMatrix(self.value + other.value, self.eps + other.eps)

    def scale(self, c) -> "DualMatrix":
        return DualMatrix(self.value.scale(c), self.eps.scale(c))

    def entry(self, i: int, j: int) -> DualScalar:
        return DualScalar(self.value[i, j], self.eps[i, j])

    @classmethod
    def identity(cls, n: int) -> "DualMatrix":
        return cls(RationalMatrix.identity(n), RationalMatrix.zeros(n))


@dataclass(frozen=True)
class MatrixSeries:
    """Matrix-valued polynomial in t truncated modulo ``t**order``.

    ``coeffs[j]`` is the coefficient matrix of ``t**j``.
    """

    coeffs: tuple[RationalMatrix, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @classmethod
    def constant(cls, X: RationalMatrix, order: int) -> "MatrixSeries":
        z = RationalMatrix.zeros(X.rows, X.cols)
        return cls((X,) + (z,) * (order - 1))

    @classmethod
    def identity(cls, n: int, order: int) -> "MatrixSeries":
        return cls.constant(RationalMatrix.identity(n), order)

    def __matmul__(self, other: "MatrixSeries") -> "MatrixSeries":
        N = min(self.order, other.order)
        out = []
        for k in range(N):
            acc = None
            for i in range(k + 1):
                a, b = self.coeffs[i], other.coeffs[k - i]
                if a.is_zero() or b.is_zero():
                    continue
                term = a @ b
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else RationalMatrix.zeros(self.coeffs[0].rows, other.coeffs[0].cols))
        return MatrixSeries(tuple(out))

    def __add__(self, other: "MatrixSeries") -> "MatrixSeries":
        N = min(self.order, other.order)
        return MatrixSeries(tuple(self.coeffs[k] + other.coeffs[k] for k in range(N)))

    def scale(self, c) -> "MatrixSeries":
        return MatrixSeries(tuple(a.scale(c) for a in self.coeffs))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)
