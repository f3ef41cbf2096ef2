"""The Hochschild cochain complex at a point of Rep_A^n and what it computes.

For a presentation A = F/J with generators x_1..x_m and relations f_1..f_r the
first terms of a free bimodule resolution of A are F_0 = (A^e)^m and
F_1 = (A^e)^r, with F_1 -> F_0 given by Fox derivatives.  Applying
Hom_{A^e}(-, End_k(M)) at a point rho gives

    M_n  --d0-->  M_n^m  --d1-->  M_n^r  [--d2-->  M_n^{r2}]

where d0 is B -> (rho(x_l) B - B rho(x_l))_l and d1 is the linearisation of
the relations.  We index so that ker d0 is the commutant End_A(M) and ker d1
is the space of rho-derivations, i.e. the tangent space of Rep_A^n at rho.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, InvalidPointError, NotTangentError, ResolutionError
from .exactla import (
    DualMatrix,
    Inconsistency,
    KernelBasis,
    MatrixSeries,
    RationalMatrix,
    kernel,
    rank,
    solve,
)
from .ncalg import BimoduleElement, Presentation, evaluate_generic, fox_derivative
from .repscheme import RepPoint, check_point, require_valid


@dataclass(frozen=True)
class ResolutionStep:
    """A map F_2 -> F_1 of free bimodules: an r2 x r matrix of bimodule elements.

    Row s is the image of the s-th basis element of F_2, as a combination of
    the relation slots of F_1.
    """

    entries: tuple[tuple[BimoduleElement, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(row) for row in self.entries))

    @property
    def rows(self) -> int:
        return len(self.entries)

    def check_shape(self, P: Presentation) -> None:
        for s, row in enumerate(self.entries):
            if len(row) != P.r:
                raise ResolutionError(f"resolution row {s} has {len(row)} entries, expected r = {P.r}")
            for elem in row:
                for u, w, _ in elem:
                    if any(l >= P.m for l in u + w):
                        raise ResolutionError(f"resolution row {s} uses a generator index >= {P.m}")


@dataclass(frozen=True)
class CochainData:
    n: int
    m: int
    r: int
    d0: RationalMatrix
    d1: RationalMatrix
    d2: RationalMatrix | None = None
    r2: int = 0


def _block_matrix(blocks: Sequence[Sequence[RationalMatrix]], rows: int, cols: int) -> RationalMatrix:
    if not blocks:
        return RationalMatrix(0, cols)
    stripes = [RationalMatrix.hstack(list(row), row[0].rows) for row in blocks]
    return RationalMatrix.vstack(stripes, cols)


def _d0(p: RepPoint) -> RationalMatrix:
    n = p.n
    I = RationalMatrix.identity(n)
    blocks = [X.kron(I) - I.kron(X.transpose()) for X in p.matrices]
    if not blocks:
        return RationalMatrix(0, n * n)
    return RationalMatrix.vstack(blocks, n * n)


def _d1(P: Presentation, p: RepPoint) -> RationalMatrix:
    n, nn = p.n, p.n * p.n
    blocks = [
        [fox_derivative(f, l, P.m).operator(p.matrices, n) for l in range(P.m)]
        for f in P.relations
    ]
    if P.m == 0:
        return RationalMatrix(P.r * nn, 0)
    return _block_matrix(blocks, P.r * nn, P.m * nn)


def _d2(P: Presentation, p: RepPoint, res2: ResolutionStep) -> RationalMatrix:
    nn = p.n * p.n
    if P.r == 0:
        return RationalMatrix(res2.rows * nn, 0)
    blocks = [[elem.operator(p.matrices, p.n) for elem in row] for row in res2.entries]
    return _block_matrix(blocks, res2.rows * nn, P.r * nn)


def build_complex(P: Presentation, p: RepPoint, res2: ResolutionStep | None = None) -> CochainData:
    """Matrices of d0, d1 (and d2 when a resolution step is supplied) at ``p``."""
    require_valid(P, p)
    d0 = _d0(p)
    d1 = _d1(P, p)
    d2 = None
    r2 = 0
    if res2 is not None:
        res2.check_shape(P)
        d2 = _d2(P, p, res2)
        r2 = res2.rows
        comp = d2 @ d1
        if not comp.is_zero():
            nn = p.n * p.n
            i, j, x = next(comp.nonzero_entries())
            witness = {"row": i // nn, "relation": j // nn,
                       "entry": (i % nn // p.n + 1, i % p.n + 1), "value": str(x)}
            raise ResolutionError("resolution step fails d2*d1 = 0 at this point", witness)
    return CochainData(p.n, P.m, P.r, d0, d1, d2, r2)


def apply_d1(P: Presentation, p: RepPoint, direction: Sequence[RationalMatrix]) -> list[RationalMatrix]:
    """d1 applied to an m-tuple of matrices, returned as r matrices."""
    n = p.n
    d1 = _d1(P, p)
    vec = [x for X in direction for x in X.entries]
    out = d1.apply(vec)
    return [RationalMatrix(n, n, out[k * n * n:(k + 1) * n * n]) for k in range(P.r)]


def tangent_space(P: Presentation, p: RepPoint) -> KernelBasis:
    """Basis of ker d1, the rho-derivations, i.e. T_p Rep_A^n."""
    require_valid(P, p)
    return kernel(_d1(P, p))


@dataclass(frozen=True)
class ExtReport:
    """Dimensions of Ext^0, Ext^1, Ext^2 of M with itself.

    ``ext2_kind`` is ``"exact"`` when the complex reaches F_2 (or r = 0) and
    ``"upper_bound"`` otherwise, in which case ext2 is the cokernel dimension
    of d1 and depends on the chosen presentation.
    """

    ext0: int
    ext1: int
    ext2: int
    ext2_kind: str
    tangent_dim: int
    inner_dim: int
    rank_d0: int = field(default=0, compare=False)
    rank_d1: int = field(default=0, compare=False)

    @property
    def ext2_exact(self) -> bool:
        return self.ext2_kind == "exact"

    def as_dict(self) -> dict:
        return {
            "ext0": self.ext0,
            "ext1": self.ext1,
            "ext2": self.ext2,
            "ext2_kind": self.ext2_kind,
            "tangent_dim": self.tangent_dim,
            "inner_dim": self.inner_dim,
        }


def _report(cx: CochainData) -> ExtReport:
    nn = cx.n * cx.n
    rank0 = rank(cx.d0)
    rank1 = rank(cx.d1)
    ker0 = nn - rank0
    ker1 = cx.m * nn - rank1
    if cx.d2 is not None:
        ext2 = (cx.r * nn - rank(cx.d2)) - rank1
        kind = "exact"
    elif cx.r == 0:
        ext2, kind = 0, "exact"
    else:
        ext2, kind = cx.r * nn - rank1, "upper_bound"
    return ExtReport(ker0, ker1 - rank0, ext2, kind, ker1, nn - ker0, rank0, rank1)


def ext_dimensions(P: Presentation, p: RepPoint, res2: ResolutionStep | None = None) -> ExtReport:
    return _report(build_complex(P, p, res2))


@dataclass(frozen=True)
class SmoothVerdict:
    certified: bool
    reason: str | None
    report: ExtReport

    @property
    def status(self) -> str:
        return "certified-smooth" if self.certified else "no-certificate"


def smooth_certificate(P: Presentation, p: RepPoint, assume_coherent: bool = False,
                       res2: ResolutionStep | None = None) -> SmoothVerdict:
    """Certify smoothness of Rep_A^n at ``p`` from vanishing Ext^2.

    Coherence of A cannot be checked here; it is the caller's assertion.
    """
    rep = ext_dimensions(P, p, res2)
    if not assume_coherent:
        return SmoothVerdict(False, "coherence-not-asserted", rep)
    if rep.ext2 == 0:
        return SmoothVerdict(True, None, rep)
    if rep.ext2_exact:
        return SmoothVerdict(False, "ext2-nonzero", rep)
    return SmoothVerdict(False, f"ext2-possibly-nonzero(bound={rep.ext2})", rep)


def _as_matrices(direction, n: int) -> tuple[RationalMatrix, ...]:
    if isinstance(direction, RepPoint):
        direction = direction.matrices
    mats = tuple(d if isinstance(d, RationalMatrix) else RationalMatrix.from_rows(d) for d in direction)
    for d in mats:
        if d.shape != (n, n):
            raise DimensionError("direction matrices must be n x n")
    return mats


def dual_evaluation(P: Presentation, p: RepPoint, direction) -> list[DualMatrix]:
    """Each relation evaluated at rho(x_l) + eps * direction_l."""
    n = p.n
    dirs = _as_matrices(direction, n)
    if len(dirs) != P.m:
        raise DimensionError(f"direction has {len(dirs)} matrices, expected {P.m}")
    images = [DualMatrix(X, D) for X, D in zip(p.matrices, dirs)]
    zero = DualMatrix(RationalMatrix.zeros(n), RationalMatrix.zeros(n))
    return [evaluate_generic(f, images, DualMatrix.identity(n), zero) for f in P.relations]


def deformation_check(P: Presentation, p: RepPoint, direction) -> bool:
    """True iff rho + eps*direction satisfies every relation over k[eps]/(eps^2)."""
    require_valid(P, p)
    return all(val.eps.is_zero() for val in dual_evaluation(P, p, direction))


@dataclass(frozen=True)
class LiftResult:
    """Outcome of order-by-order lifting.

    ``series[l][j]`` is the t^j coefficient of the l-th generator's image.  When
    obstructed, ``series`` holds the partial lift up to degree
    ``obstructed_order - 1`` and ``obstruction`` is the order-j error of the
    relations (flattened), which is not in the image of d1.
    """

    order: int
    lifted: bool
    series: tuple[tuple[RationalMatrix, ...], ...]
    obstructed_order: int | None = None
    obstruction: tuple[Fraction, ...] | None = None
    certificate: Inconsistency | None = None

    @property
    def status(self) -> str:
        return "lifted" if self.lifted else f"obstructed-at-order-{self.obstructed_order}"


def _series_errors(P: Presentation, n: int, coeffs: Sequence[Sequence[RationalMatrix]], order: int):
    z = RationalMatrix.zeros(n)
    images = []
    for cs in coeffs:
        cs = tuple(cs[:order]) + (z,) * max(0, order - len(cs))
        images.append(MatrixSeries(cs))
    zero = MatrixSeries((z,) * order)
    return [evaluate_generic(f, images, MatrixSeries.identity(n, order), zero) for f in P.relations]


def lift_deformation(P: Presentation, p: RepPoint, direction, order: int = 4) -> LiftResult:
    """Extend rho + t*direction to a solution of the relations modulo t^order.

    At order j the correction Phi^(j) solves d1(Phi^(j)) = -E_j, where E_j is
    the t^j coefficient of the relations at the lift so far.  The echelon
    solution of :func:`solve` is used, so the lift itself is one gauge choice;
    only the lifted/obstructed verdict is canonical.
    """
    if order < 2:
        raise ValueError("order must be >= 2")
    require_valid(P, p)
    n = p.n
    dirs = _as_matrices(direction, n)
    if not deformation_check(P, p, dirs):
        raise NotTangentError("direction is not in the tangent space (d1(direction) != 0)")
    d1 = _d1(P, p)
    coeffs = [[X, D] for X, D in zip(p.matrices, dirs)]
    nn = n * n
    for j in range(2, order):
        errs = _series_errors(P, n, coeffs, j + 1)
        E = [x for val in errs for x in val.coeffs[j].entries]
        sol = solve(d1, [-x for x in E])
        if isinstance(sol, Inconsistency):
            return LiftResult(order, False, tuple(tuple(c) for c in coeffs), j, tuple(E), sol)
        for l in range(P.m):
            coeffs[l].append(RationalMatrix(n, n, sol[l * nn:(l + 1) * nn]))
    return LiftResult(order, True, tuple(tuple(c) for c in coeffs))


def lift_residual(P: Presentation, lift: LiftResult) -> list[MatrixSeries]:
    """Relations evaluated at a lift, modulo t^order (all zero for a genuine lift)."""
    n = lift.series[0][0].rows if lift.series else 0
    return _series_errors(P, n, lift.series, lift.order)


@dataclass(frozen=True)
class ScanRow:
    label: str
    z0: int
    z1: int
    ext2: int
    ext2_kind: str
    tangent_dim: int

    def as_dict(self) -> dict:
        return {"label": self.label, "z0": self.z0, "z1": self.z1, "ext2": self.ext2,
                "ext2_kind": self.ext2_kind, "tangent_dim": self.tangent_dim}


def semicontinuity_scan(P: Presentation, family: Sequence[tuple[str, RepPoint]],
                        res2: ResolutionStep | None = None) -> list[ScanRow]:
    """Kernel dimensions of d0 and d1 along an explicit list of points."""
    for label, pt in family:
        verdict = check_point(P, pt)
        if not verdict.valid:
            v = verdict.violations[0]
            raise InvalidPointError(
                f"family point {label!r} violates relation {v.relation} at entry ({v.i},{v.j})",
                verdict.violations,
            )
    rows = []
    for label, pt in family:
        rep = ext_dimensions(P, pt, res2)
        rows.append(ScanRow(label, rep.ext0, rep.tangent_dim, rep.ext2, rep.ext2_kind, rep.tangent_dim))
    return rows
