"""Representation schemes: generic-matrix ideals, point checks, the GL_n action."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DimensionError, InvalidPointError, SingularMatrixError
from .exactla import RationalMatrix, kernel, rank, to_fraction
from .ncalg import NCPolynomial, Presentation, _WordCache, substitute

DEFAULT_ISO_TRIES = 32


@dataclass(frozen=True, order=True)
class GenericVariable:
    """The coordinate xi_{l,i,j}: entry (i, j) of the l-th generic matrix, 1-based."""

    l: int
    i: int
    j: int

    def name(self, names: Sequence[str] | None = None) -> str:
        g = names[self.l] if names is not None else str(self.l)
        return f"xi[{g},{self.i},{self.j}]"


Monomial = tuple  # tuple[tuple[GenericVariable, int], ...], sorted by variable


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class CommPolynomial:
    """Commutative polynomial in the generic-matrix coordinates."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = {}
        for mono, c in items:
            mono = tuple(sorted((v, e) for v, e in mono if e))
            acc[mono] = acc.get(mono, Fraction(0)) + to_fraction(c)
        self._terms = {k: acc[k] for k in sorted(acc, key=_mono_key) if acc[k]}

    @classmethod
    def variable(cls, v: GenericVariable) -> "CommPolynomial":
        return cls({((v, 1),): 1})

    @classmethod
    def constant(cls, c) -> "CommPolynomial":
        return cls({(): c})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, CommPolynomial):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __add__(self, other: "CommPolynomial") -> "CommPolynomial":
        return CommPolynomial(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> "CommPolynomial":
        return CommPolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "CommPolynomial") -> "CommPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "CommPolynomial":
        if not isinstance(other, CommPolynomial):
            c = to_fraction(other)
            return CommPolynomial({k: c * a for k, a in self._terms.items()})
        return CommPolynomial(
            (_mono_mul(a, b), x * y) for a, x in self._terms.items() for b, y in other._terms.items()
        )

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self._terms), default=-1)

    def evaluate(self, coords: Mapping[GenericVariable, Fraction]) -> Fraction:
        total = Fraction(0)
        for mono, c in self._terms.items():
            term = c
            for v, e in mono:
                term *= coords[v] ** e
            total += term
        return total

    def format(self, names: Sequence[str] | None = None) -> str:
        """``c * xi[x,1,2]^e * ...`` terms joined by `` + `` / `` - ``."""
        if not self._terms:
            return "0"
        parts = []
        for k, (mono, c) in enumerate(self._terms.items()):
            factors = [str(abs(c))] + [v.name(names) + (f"^{e}" if e > 1 else "") for v, e in mono]
            body = " * ".join(factors)
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"CommPolynomial({self.format()})"


def _mono_key(mono: Monomial):
    return (sum(e for _, e in mono), mono)


@dataclass(frozen=True)
class IdealGenerator:
    """Entry (i, j) (1-based) of relation ``relation`` evaluated at the generic matrices."""

    relation: int
    i: int
    j: int
    polynomial: CommPolynomial


class _CommMatrix:
    """Square matrix of CommPolynomials; only what generic evaluation needs."""

    def __init__(self, n: int, entries: list[CommPolynomial]):
        self.n = n
        self.entries = entries

    @classmethod
    def identity(cls, n: int) -> "_CommMatrix":
        one, zero = CommPolynomial.constant(1), CommPolynomial()
        return cls(n, [one if i == j else zero for i in range(n) for j in range(n)])

    @classmethod
    def generic(cls, l: int, n: int) -> "_CommMatrix":
        return cls(n, [CommPolynomial.variable(GenericVariable(l, i + 1, j + 1)) for i in range(n) for j in range(n)])

    def __matmul__(self, other: "_CommMatrix") -> "_CommMatrix":
        n = self.n
        out = []
        for i in range(n):
            for j in range(n):
                acc = CommPolynomial()
                for k in range(n):
                    a, b = self.entries[i * n + k], other.entries[k * n + j]
                    if a and b:
                        acc = acc + a * b
                out.append(acc)
        return _CommMatrix(n, out)

    def __add__(self, other: "_CommMatrix") -> "_CommMatrix":
        return _CommMatrix(self.n, [a + b for a, b in zip(self.entries, other.entries)])

    def scale(self, c) -> "_CommMatrix":
        return _CommMatrix(self.n, [a * c for a in self.entries])


def emit_ideal_generators(P: Presentation, n: int) -> list[IdealGenerator]:
    """The r*n^2 entries of the relations evaluated at the generic matrices.

    Ordered by relation index, then row-major entry.  Zero generators are kept.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    generic = [_CommMatrix.generic(l, n) for l in range(P.m)]
    cache = _WordCache(generic, n, identity=_CommMatrix.identity(n))
    out = []
    for k, f in enumerate(P.relations):
        acc = _CommMatrix(n, [CommPolynomial()] * (n * n))
        for w, c in f.items():
            acc = acc + cache(w).scale(c)
        for idx, poly in enumerate(acc.entries):
            out.append(IdealGenerator(k, idx // n + 1, idx % n + 1, poly))
    return out


@dataclass(frozen=True)
class RepPoint:
    """An m-tuple of n x n rational matrices, the images of the generators."""

    matrices: tuple[RationalMatrix, ...]

    def __post_init__(self):
        mats = tuple(self.matrices)
        object.__setattr__(self, "matrices", mats)
        if mats:
            n = mats[0].rows
            for X in mats:
                if X.shape != (n, n):
                    raise DimensionError("all matrices of a RepPoint must be n x n")

    @classmethod
    def of(cls, *mats) -> "RepPoint":
        return cls(tuple(m if isinstance(m, RationalMatrix) else RationalMatrix.from_rows(m) for m in mats))

    @property
    def n(self) -> int:
        return self.matrices[0].rows if self.matrices else 0

    @property
    def m(self) -> int:
        return len(self.matrices)

    def __getitem__(self, l: int) -> RationalMatrix:
        return self.matrices[l]

    def coordinates(self) -> dict[GenericVariable, Fraction]:
        return {
            GenericVariable(l, i + 1, j + 1): X[i, j]
            for l, X in enumerate(self.matrices)
            for i in range(X.rows)
            for j in range(X.cols)
        }

    @classmethod
    def from_coordinates(cls, coords: Mapping[GenericVariable, Fraction], m: int, n: int) -> "RepPoint":
        return cls(tuple(
            RationalMatrix(n, n, (coords[GenericVariable(l, i + 1, j + 1)] for i in range(n) for j in range(n)))
            for l in range(m)
        ))

    def flatten(self) -> tuple[Fraction, ...]:
        return tuple(x for X in self.matrices for x in X.entries)


def _require_arity(P: Presentation, p: RepPoint) -> None:
    if p.m != P.m:
        raise DimensionError(f"point has {p.m} matrices but the presentation has {P.m} generators")


def evaluate(f: NCPolynomial, p: RepPoint) -> RationalMatrix:
    """The matrix f(rho(x_1), ..., rho(x_m))."""
    return substitute(f, p.matrices, p.n)


@dataclass(frozen=True)
class Violation:
    relation: int
    i: int
    j: int
    value: Fraction


@dataclass(frozen=True)
class PointCheck:
    valid: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def check_point(P: Presentation, p: RepPoint) -> PointCheck:
    """Evaluate every relation at ``p``; report the first nonzero entry of each violated one."""
    _require_arity(P, p)
    bad = []
    for k, f in enumerate(P.relations):
        val = evaluate(f, p)
        for i, j, x in val.nonzero_entries():
            bad.append(Violation(k, i + 1, j + 1, x))
            break
    return PointCheck(not bad, tuple(bad))


def require_valid(P: Presentation, p: RepPoint) -> None:
    verdict = check_point(P, p)
    if not verdict.valid:
        v = verdict.violations[0]
        raise InvalidPointError(
            f"point violates relation {v.relation} at entry ({v.i},{v.j}) = {v.value}",
            verdict.violations,
        )


class GroupElement:
    """An invertible n x n matrix (checked by rank at construction)."""

    __slots__ = ("g", "inverse")

    def __init__(self, g: RationalMatrix | Sequence[Sequence]):
        if not isinstance(g, RationalMatrix):
            g = RationalMatrix.from_rows(g)
        if not g.is_square or rank(g) != g.rows:
            raise SingularMatrixError("group element must be an invertible square matrix")
        self.g = g
        self.inverse = g.inverse()

    @property
    def n(self) -> int:
        return self.g.rows

    def inv(self) -> "GroupElement":
        return GroupElement(self.inverse)

    def __repr__(self) -> str:
        return f"GroupElement({self.g!r})"


def conjugate(p: RepPoint, g: GroupElement) -> RepPoint:
    """X_l -> g X_l g^{-1} for every l."""
    if g.n != p.n:
        raise DimensionError("group element and point have different sizes")
    return RepPoint(tuple(g.g @ X @ g.inverse for X in p.matrices))


@dataclass(frozen=True)
class IsoVerdict:
    status: str  # "isomorphic" | "not-isomorphic" | "inconclusive"
    witness: RationalMatrix | None
    intertwiner_dim: int
    tries: int
    seed: int


def intertwiner_space(p: RepPoint, q: RepPoint):
    """Kernel of T -> (T p_l - q_l T)_l, with T flattened row-major."""
    n = p.n
    I = RationalMatrix.identity(n)
    blocks = [I.kron(X.transpose()) - Y.kron(I) for X, Y in zip(p.matrices, q.matrices)]
    if not blocks:
        return kernel(RationalMatrix(0, n * n))
    return kernel(RationalMatrix.vstack(blocks, n * n))


def module_isomorphic(P: Presentation, p: RepPoint, q: RepPoint,
                      tries: int = DEFAULT_ISO_TRIES, seed: int = 0) -> IsoVerdict:
    """Decide whether ``q = conjugate(p, g)`` for some g, by bounded random search.

    The witness g satisfies g p_l = q_l g.  ``inconclusive`` means that the
    intertwiner space is nonzero but no invertible element was found among its
    basis vectors and ``tries`` seeded random integer combinations.
    """
    require_valid(P, p)
    require_valid(P, q)
    if p.n != q.n:
        return IsoVerdict("not-isomorphic", None, 0, 0, seed)
    n = p.n
    ker = intertwiner_space(p, q)
    if p == q:
        return IsoVerdict("isomorphic", RationalMatrix.identity(n), ker.dimension, 0, seed)
    if ker.dimension == 0:
        return IsoVerdict("not-isomorphic", None, 0, 0, seed)

    def as_matrix(v):
        return RationalMatrix(n, n, v)

    attempts = 0
    for v in ker.basis_vectors:
        attempts += 1
        T = as_matrix(v)
        if rank(T) == n:
            return IsoVerdict("isomorphic", T, ker.dimension, attempts, seed)
    rng = random.Random(seed)
    bound = max(10, 4 * n)
    for _ in range(tries):
        attempts += 1
        coeffs = [rng.randint(-bound, bound) for _ in ker.basis_vectors]
        v = [sum((c * b[k] for c, b in zip(coeffs, ker.basis_vectors)), Fraction(0)) for k in range(n * n)]
        T = as_matrix(v)
        if rank(T) == n:
            return IsoVerdict("isomorphic", T, ker.dimension, attempts, seed)
    return IsoVerdict("inconclusive", None, ker.dimension, attempts, seed)
