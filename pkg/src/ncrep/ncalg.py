"""Free associative algebra over Q: words, polynomials, presentations, Fox derivatives.

A word is a tuple of generator indices; the empty tuple is the unit.  Words
are ordered graded-lexicographically (shorter first, then by index sequence),
and every deterministic iteration in the package follows that order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DimensionError
from .exactla import RationalMatrix, to_fraction

Word = tuple  # tuple[int, ...]

UNIT: Word = ()


def word_key(w: Word) -> tuple:
    """Sort key for the graded-lex order."""
    return (len(w), w)


def words_up_to(m: int, degree: int) -> list[Word]:
    """All words in ``m`` letters of length <= degree, graded-lex ordered."""
    out: list[Word] = [()]
    layer: list[Word] = [()]
    for _ in range(degree):
        layer = [w + (l,) for w in layer for l in range(m)]
        layer.sort()
        out.extend(layer)
    return out


class NCPolynomial:
    """Element of Q<x_0, ..., x_{m-1}> as a map word -> nonzero Fraction."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, object] | Iterable[tuple[Word, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, Fraction] = {}
        for w, c in items:
            w = tuple(w)
            acc[w] = acc.get(w, Fraction(0)) + to_fraction(c)
        self._terms = {w: acc[w] for w in sorted(acc, key=word_key) if acc[w]}
        self._hash = None

    @classmethod
    def constant(cls, c) -> "NCPolynomial":
        return cls({(): c})

    @classmethod
    def generator(cls, l: int) -> "NCPolynomial":
        return cls({(l,): 1})

    @classmethod
    def word(cls, w: Word, c=1) -> "NCPolynomial":
        return cls({tuple(w): c})

    @property
    def terms(self) -> dict[Word, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, w: Word) -> Fraction:
        return self._terms.get(tuple(w), Fraction(0))

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def max_index(self) -> int:
        return max((l for w in self._terms for l in w), default=-1)

    def __eq__(self, other) -> bool:
        if isinstance(other, NCPolynomial):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"NCPolynomial({format_poly(self)})"

    def __add__(self, other: "NCPolynomial") -> "NCPolynomial":
        return NCPolynomial(list(self._terms.items()) + list(_as_poly(other)._terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "NCPolynomial":
        return NCPolynomial({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "NCPolynomial") -> "NCPolynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "NCPolynomial":
        return _as_poly(other) - self

    def scale(self, c) -> "NCPolynomial":
        c = to_fraction(c)
        return NCPolynomial({w: c * a for w, a in self._terms.items()})

    def __mul__(self, other) -> "NCPolynomial":
        if not isinstance(other, NCPolynomial):
            return self.scale(other)
        return nc_multiply(self, other)

    def __rmul__(self, other) -> "NCPolynomial":
        return self.scale(other)

    def __pow__(self, k: int) -> "NCPolynomial":
        out = NCPolynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out


def _as_poly(x) -> NCPolynomial:
    return x if isinstance(x, NCPolynomial) else NCPolynomial.constant(x)


def nc_multiply(f: NCPolynomial, g: NCPolynomial) -> NCPolynomial:
    return NCPolynomial((u + w, a * b) for u, a in f.items() for w, b in g.items())


def format_word(w: Word, names: Sequence[str] | None = None) -> str:
    if not w:
        return "1"
    sym = (lambda l: names[l]) if names is not None else (lambda l: f"x{l}")
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        k = j - i
        parts.append(sym(w[i]) + (f"^{k}" if k > 1 else ""))
        i = j
    return "*".join(parts)


def format_poly(f: NCPolynomial, names: Sequence[str] | None = None) -> str:
    if not f:
        return "0"
    out = []
    for idx, (w, c) in enumerate(f.items()):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not w:
            body = str(a)
        elif a == 1:
            body = format_word(w, names)
        else:
            body = f"{a}*{format_word(w, names)}"
        if idx == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


@dataclass(frozen=True)
class Presentation:
    """Finitely presented algebra Q<generators> / (relations)."""

    generator_names: tuple[str, ...]
    relations: tuple[NCPolynomial, ...] = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generator_names", tuple(self.generator_names))
        object.__setattr__(self, "relations", tuple(self.relations))
        names = self.generator_names
        if any(not n for n in names):
            raise ValueError("generator names must be nonempty")
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for k, f in enumerate(self.relations):
            if f.max_index() >= len(names):
                raise ValueError(f"relation {k} uses a generator index >= {len(names)}")

    @property
    def m(self) -> int:
        return len(self.generator_names)

    @property
    def r(self) -> int:
        return len(self.relations)

    def index(self, name: str) -> int:
        return self.generator_names.index(name)

    def gen(self, name: str) -> NCPolynomial:
        return NCPolynomial.generator(self.index(name))

    def max_degree(self) -> int:
        return max((f.degree() for f in self.relations), default=0)

    @classmethod
    def free(cls, names: Sequence[str] | int) -> "Presentation":
        if isinstance(names, int):
            names = [f"x{i}" for i in range(names)] if names > 3 else ["x", "y", "z"][:names]
        return cls(tuple(names), ())


class BimoduleElement:
    """Element of F (x) F^op as a sum of ``coeff * (left | right)``."""

    __slots__ = ("_summands",)

    def __init__(self, summands: Iterable[tuple[Word, Word, object]] = ()):
        acc: dict[tuple[Word, Word], Fraction] = {}
        for u, w, c in summands:
            key = (tuple(u), tuple(w))
            acc[key] = acc.get(key, Fraction(0)) + to_fraction(c)
        keys = sorted(acc, key=lambda k: (word_key(k[0]), word_key(k[1])))
        self._summands = tuple((u, w, acc[(u, w)]) for u, w in keys if acc[(u, w)])

    @property
    def summands(self) -> tuple[tuple[Word, Word, Fraction], ...]:
        return self._summands

    def __iter__(self):
        return iter(self._summands)

    def __bool__(self) -> bool:
        return bool(self._summands)

    def __eq__(self, other) -> bool:
        if isinstance(other, BimoduleElement):
            return self._summands == other._summands
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._summands)

    def __repr__(self) -> str:
        return "BimoduleElement(" + " + ".join(f"{c}({u}|{w})" for u, w, c in self._summands) + ")"

    def __add__(self, other: "BimoduleElement") -> "BimoduleElement":
        return BimoduleElement(self._summands + other._summands)

    def __neg__(self) -> "BimoduleElement":
        return BimoduleElement((u, w, -c) for u, w, c in self._summands)

    def __sub__(self, other: "BimoduleElement") -> "BimoduleElement":
        return self + (-other)

    def left_mul(self, f: NCPolynomial) -> "BimoduleElement":
        """``f`` concatenated into every prefix slot."""
        return BimoduleElement((p + u, w, a * c) for p, a in f.items() for u, w, c in self._summands)

    def right_mul(self, g: NCPolynomial) -> "BimoduleElement":
        """``g`` concatenated into every suffix slot."""
        return BimoduleElement((u, w + s, c * a) for u, w, c in self._summands for s, a in g.items())

    def operator(self, images: Sequence[RationalMatrix], n: int) -> RationalMatrix:
        """The n^2 x n^2 matrix of ``Phi -> sum c * rho(left) Phi rho(right)``.

        Uses the row-major flattening ``vec(A Phi B) = (A kron B^T) vec(Phi)``.
        """
        cache = _WordCache(images, n)
        out = RationalMatrix.zeros(n * n)
        for u, w, c in self._summands:
            out = out + cache(u).kron(cache(w).transpose()).scale(c)
        return out


def fox_derivative(f: NCPolynomial, l: int, m: int | None = None) -> BimoduleElement:
    """Noncommutative partial derivative of ``f`` with respect to generator ``l``.

    Each occurrence of x_l inside a word contributes (prefix | suffix).
    """
    if l < 0 or (m is not None and l >= m):
        raise IndexError(f"generator index {l} out of range")
    out = []
    for w, c in f.items():
        for j, letter in enumerate(w):
            if letter == l:
                out.append((w[:j], w[j + 1:], c))
    return BimoduleElement(out)


class _WordCache:
    """Memoised products rho(w) for words w, sharing prefixes."""

    def __init__(self, images, n, identity=None, mul=None):
        self.images = images
        self.mul = mul or (lambda a, b: a @ b)
        self.memo = {(): identity if identity is not None else RationalMatrix.identity(n)}

    def __call__(self, w: Word):
        memo = self.memo
        if w in memo:
            return memo[w]
        val = self.mul(self(w[:-1]), self.images[w[-1]])
        memo[w] = val
        return val


def _check_point(point: Sequence[RationalMatrix], need: int) -> int:
    if not point and need > 0:
        raise DimensionError("empty point")
    n = point[0].rows if point else 0
    for X in point:
        if X.shape != (n, n):
            raise DimensionError("all point matrices must be square of the same size")
    if need > len(point):
        raise DimensionError(f"word uses generator {need - 1} but point has {len(point)} matrices")
    return n


def substitute_words(w: Word, point: Sequence[RationalMatrix], n: int | None = None) -> RationalMatrix:
    """Ordered product of the images of the letters of ``w``; unit -> identity."""
    if n is None:
        n = _check_point(point, max(w, default=-1) + 1)
    else:
        if point:
            _check_point(point, max(w, default=-1) + 1)
    out = RationalMatrix.identity(n)
    for l in w:
        out = out @ point[l]
    return out


def substitute(f: NCPolynomial, point: Sequence[RationalMatrix], n: int | None = None) -> RationalMatrix:
    """Linear extension of :func:`substitute_words` to polynomials."""
    if n is None:
        n = _check_point(point, f.max_index() + 1)
    else:
        if point:
            _check_point(point, f.max_index() + 1)
    cache = _WordCache(point, n)
    out = RationalMatrix.zeros(n)
    for w, c in f.items():
        out = out + cache(w).scale(c)
    return out


def evaluate_generic(f: NCPolynomial, images: Sequence, identity, zero, mul: Callable = None):
    """Evaluate ``f`` on arbitrary matrix-like objects with ``+``, ``@`` and ``scale``.

    Used for dual-number and truncated-series evaluation.
    """
    cache = _WordCache(images, None, identity=identity, mul=mul)
    out = zero
    for w, c in f.items():
        out = out + cache(w).scale(c)
    return out
