"""k-points of the Nori-Hilbert scheme: cyclic pairs, canonical forms, Hilb^1."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .cohomology import tangent_space
from .errors import DimensionError, NotCyclicError
from .exactla import RationalMatrix, rank, to_fraction
from .ncalg import NCPolynomial, Presentation, Word
from .repscheme import GroupElement, RepPoint, check_point, conjugate, require_valid


@dataclass(frozen=True)
class PointedRep:
    point: RepPoint
    v: tuple[Fraction, ...]

    def __post_init__(self):
        v = tuple(to_fraction(x) for x in self.v)
        object.__setattr__(self, "v", v)
        if len(v) != self.point.n:
            raise DimensionError(f"vector of length {len(v)} for n = {self.point.n}")

    @property
    def n(self) -> int:
        return self.point.n


def act(g: GroupElement, pr: PointedRep) -> PointedRep:
    """(rho, v) -> (rho^g, g v)."""
    return PointedRep(conjugate(pr.point, g), g.g.apply(pr.v))


@dataclass(frozen=True)
class CanonicalForm:
    """A cyclic pair written in its Krylov word basis; the vector is e_1."""

    point: RepPoint
    word_basis: tuple[Word, ...]
    v_index: int = 0


def _krylov(pr: PointedRep) -> tuple[list[Word], list[tuple[Fraction, ...]]]:
    """Greedy graded-lex word basis of rho(A) v.

    Candidates of length k are x_l * w for selected w of length k-1; a word
    whose right factor was rejected is already in the span of smaller words.
    """
    mats = pr.point.matrices
    words: list[Word] = []
    vecs: list[tuple[Fraction, ...]] = []
    if not any(pr.v):
        return words, vecs

    def independent(vec) -> bool:
        return rank(RationalMatrix.from_rows(vecs + [vec])) == len(vecs) + 1

    words.append(())
    vecs.append(pr.v)
    layer = [((), pr.v)]
    while layer and len(words) < pr.n:
        cands = sorted(((l,) + w, mats[l].apply(vec)) for w, vec in layer for l in range(len(mats)))
        layer = []
        for w, vec in cands:
            if len(words) == pr.n:
                break
            if independent(list(vec)):
                words.append(w)
                vecs.append(vec)
                layer.append((w, vec))
    return words, vecs


def krylov_span(pr: PointedRep) -> tuple[int, tuple[Word, ...]]:
    """Dimension of rho(A) v and its greedy graded-lex word basis."""
    words, _ = _krylov(pr)
    return len(words), tuple(words)


def is_cyclic(pr: PointedRep) -> bool:
    return krylov_span(pr)[0] == pr.n


def hilb_canonical_form(pr: PointedRep) -> CanonicalForm:
    """Rewrite (rho, v) in the basis rho(w_1)v, ..., rho(w_n)v of its Krylov words.

    Two cyclic pairs have equal canonical forms iff they define the same left
    ideal ker(a -> rho(a) v), so this is a section of the GL_n-orbit map.
    """
    words, vecs = _krylov(pr)
    if len(words) != pr.n:
        raise NotCyclicError(f"vector spans a {len(words)}-dimensional submodule, need {pr.n}")
    S = RationalMatrix.from_columns(vecs)
    Sinv = S.inverse()
    return CanonicalForm(RepPoint(tuple(Sinv @ X @ S for X in pr.point.matrices)), tuple(words))


def canonical_pair(cf: CanonicalForm) -> PointedRep:
    n = cf.point.n
    return PointedRep(cf.point, tuple(1 if i == 0 else 0 for i in range(n)))


@dataclass(frozen=True)
class HilbDimension:
    dimension: int
    tangent_dim: int
    caveats: tuple[str, ...]


def hilb_dimension_at(P: Presentation, pr: PointedRep) -> HilbDimension:
    """dim T(Rep x A^n) - dim GL_n at a cyclic pair.

    This is the local dimension of Hilb_A^n only where the point is smooth.
    """
    require_valid(P, pr.point)
    if not is_cyclic(pr):
        raise NotCyclicError("hilb dimension is defined on the cyclic locus only")
    n = pr.n
    t = tangent_space(P, pr.point).dimension
    caveats = ("equals the local dimension of Hilb only at smooth points (e.g. under a smooth certificate)",)
    return HilbDimension(t + n - n * n, t, caveats)


def commutator_relations(m: int) -> list[NCPolynomial]:
    return [NCPolynomial({(i, j): 1, (j, i): -1}) for i, j in combinations(range(m), 2)]


def abelianization(P: Presentation) -> Presentation:
    """Append x_i x_j - x_j x_i for all i < j."""
    name = f"{P.name}_ab" if P.name else None
    return Presentation(P.generator_names, P.relations + tuple(commutator_relations(P.m)), name)


def hilb1_points_check(P: Presentation, p: RepPoint) -> bool:
    """Validity of a 1-dimensional point, cross-checked against the abelianization."""
    if p.n != 1:
        raise DimensionError("hilb1_points_check needs n = 1")
    here = check_point(P, p).valid
    there = check_point(abelianization(P), p).valid
    if here != there:
        raise AssertionError("1-dimensional point distinguishes A from its abelianization")
    return here
