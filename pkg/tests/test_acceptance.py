"""End-to-end acceptance checks.

Each test carries an ``acceptance`` marker with an ordinal and a short label;
``conftest.py`` prints one PASS/FAIL line per marked test in the terminal
summary. All comparisons are exact (rational arithmetic throughout).
"""

import random
from fractions import Fraction

import pytest
import sympy

from ncrep.cohomology import (
    apply_d1,
    build_complex,
    dual_evaluation,
    ext_dimensions,
    lift_deformation,
    lift_residual,
    semicontinuity_scan,
    smooth_certificate,
    tangent_space,
)
from ncrep.exactla import RationalMatrix
from ncrep.formats import parse_family
from ncrep.hilbert import (
    PointedRep,
    act,
    hilb1_points_check,
    hilb_canonical_form,
    hilb_dimension_at,
    is_cyclic,
    krylov_span,
)
from ncrep.ncalg import Presentation
from ncrep.repscheme import (
    GroupElement,
    RepPoint,
    check_point,
    emit_ideal_generators,
)

from conftest import (
    CORPUS,
    corpus_algebra,
    corpus_cases,
    corpus_point,
    corpus_resolution,
    load_manifest,
    rand_invertible,
    rand_matrix,
    rand_point,
    relation_vanishing_at,
)

SEED = 20240611
COMM = corpus_algebra("comm2")
NILP = corpus_algebra("nilp")
FREE1 = corpus_algebra("free1")


def free(m):
    return Presentation(tuple("xyz"[:m]))


def q(c):
    return sympy.Rational(c.numerator, c.denominator)


def to_sympy(M: RationalMatrix):
    return sympy.Matrix(M.rows, M.cols, [q(c) for c in M.entries])


def dense_commuting_tangent_dim(X, Y):
    """Solve X Psi - Psi X + Phi Y - Y Phi = 0 for 8 unknowns with sympy."""
    syms = sympy.symbols("a0:8")
    Phi = sympy.Matrix(2, 2, syms[:4])
    Psi = sympy.Matrix(2, 2, syms[4:])
    Xs, Ys = to_sympy(X), to_sympy(Y)
    eqs = list(Xs * Psi - Psi * Xs + Phi * Ys - Ys * Phi)
    A, _ = sympy.linear_eq_to_matrix(eqs, syms)
    return len(A.nullspace())


def regular_commuting_points(rng, count):
    """(X, q(X)) with X having distinct eigenvalues and q a random cubic."""
    out = []
    while len(out) < count:
        X = rand_matrix(rng, 2, lo=-4, hi=4)
        tr = X[0, 0] + X[1, 1]
        det = X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0]
        if tr * tr - 4 * det == 0:
            continue
        coeffs = [rng.randint(-3, 3) for _ in range(4)]
        if not any(coeffs[1:]):
            coeffs[1] = 1
        Y = RationalMatrix.zeros(2)
        power = RationalMatrix.identity(2)
        for c in coeffs:
            Y = Y + power.scale(c)
            power = power @ X
        out.append(RepPoint((X, Y)))
    return out


@pytest.mark.acceptance(1, "free-algebra smoothness: tangent = m n^2, empty ideal, certified")
def test_free_algebra_smoothness():
    rng = random.Random(SEED)
    for m in (1, 2, 3):
        P = free(m)
        for n in (1, 2, 3):
            assert emit_ideal_generators(P, n) == []
            for _ in range(5):
                p = rand_point(rng, m, n)
                assert tangent_space(P, p).dimension == m * n * n
                assert smooth_certificate(P, p, assume_coherent=True).status == "certified-smooth"


@pytest.mark.acceptance(2, "Hilbert scheme of the free algebra has dimension n^2(m-1)+n")
def test_free_hilbert_dimension():
    rng = random.Random(SEED)
    for (m, n), want in {(2, 2): 6, (3, 2): 10, (2, 3): 12}.items():
        found = 0
        while found < 5:
            pr = PointedRep(rand_point(rng, m, n), tuple(rng.randint(-3, 3) for _ in range(n)))
            if not is_cyclic(pr):
                continue
            assert hilb_dimension_at(free(m), pr).dimension == want
            found += 1


@pytest.mark.acceptance(3, "commuting scheme: tangent 6 at regular points, 8 at origin, jump only at t=0")
def test_commuting_scheme():
    rng = random.Random(SEED)
    for p in regular_commuting_points(rng, 10):
        assert check_point(COMM, p).valid
        assert dense_commuting_tangent_dim(*p.matrices) == 6
        assert tangent_space(COMM, p).dimension == 6
    origin = RepPoint((RationalMatrix.zeros(2), RationalMatrix.zeros(2)))
    assert tangent_space(COMM, origin).dimension == 8
    fam = parse_family((CORPUS / "comm2_family.fam").read_text(), CORPUS, 2)
    rows = semicontinuity_scan(COMM, fam)
    dims = [r.tangent_dim for r in rows]
    assert [r.label for r in rows] == ["1", "1/2", "1/4", "0"]
    assert dims == [6, 6, 6, 8]


def _diag_configs():
    """Ten (multiplicities, eigenvalues) configurations with n <= 3."""
    return [
        ((1,), (0,)),
        ((1,), (Fraction(-7, 3),)),
        ((2,), (4,)),
        ((1, 1), (1, 2)),
        ((1, 1), (Fraction(1, 2), -5)),
        ((3,), (0,)),
        ((2, 1), (1, 2)),
        ((1, 2), (-3, Fraction(2, 5))),
        ((1, 1, 1), (0, 1, 2)),
        ((1, 1, 1), (Fraction(1, 3), -1, 7)),
    ]


def _brute_force_commutant_and_outer(X):
    """dim {A : XA = AX} and n^2 - dim {XA - AX}, via sympy on symbolic A."""
    n = X.rows
    syms = sympy.symbols(f"a0:{n * n}")
    A = sympy.Matrix(n, n, syms)
    Xs = to_sympy(X)
    comm = list(Xs * A - A * Xs)
    M, _ = sympy.linear_eq_to_matrix(comm, syms)
    commutant = len(M.nullspace())
    # derivations of k<x> are arbitrary; inner ones are the image of ad X
    outer = n * n - M.rank()
    return commutant, outer


@pytest.mark.acceptance(4, "one-variable Ext: ext0 = ext1 = sum of squared multiplicities")
def test_one_variable_ext():
    configs = _diag_configs()
    assert len(configs) == 10
    for mults, eigs in configs:
        entries = [e for mu, e in zip(mults, eigs) for _ in range(mu)]
        X = RationalMatrix.diag(entries)
        want = sum(mu * mu for mu in mults)
        rep = ext_dimensions(FREE1, RepPoint((X,)))
        assert (rep.ext0, rep.ext1) == (want, want)
        assert _brute_force_commutant_and_outer(X) == (want, want)


@pytest.mark.acceptance(5, "Fox Jacobian agrees with the dual-number epsilon part (100 triples)")
def test_fox_jacobian_vs_dual_numbers():
    rng = random.Random(SEED)
    for _ in range(100):
        n = rng.randint(1, 3)
        m = rng.randint(1, 3)
        p = rand_point(rng, m, n, lo=-3, hi=3)
        f = relation_vanishing_at(rng, p, 4)
        assert f.degree() <= 4
        P = Presentation(tuple("xyz"[:m]), (f,))
        D = [rand_matrix(rng, n, lo=-5, hi=5) for _ in range(m)]
        eps = [v.eps for v in dual_evaluation(P, p, D)]
        assert eps == apply_d1(P, p, D)


@pytest.mark.acceptance(6, "x^2 is obstructed at order 2; the commuting scheme lifts to order 4")
def test_obstruction_behaviour():
    zero = RepPoint.of([[0]])
    rep = ext_dimensions(NILP, zero)
    assert (rep.ext2, rep.ext2_kind) == (1, "upper_bound")
    verdict = smooth_certificate(NILP, zero, assume_coherent=True)
    assert verdict.status == "no-certificate"
    lift = lift_deformation(NILP, zero, [RationalMatrix.from_rows([[1]])], 3)
    assert lift.status == "obstructed-at-order-2"
    assert lift.obstructed_order == 2

    rng = random.Random(SEED)
    points = [RepPoint.of([[0, 0], [0, 1]], [[0, 0], [0, 0]])] + regular_commuting_points(rng, 3)
    for p in points:
        ker = tangent_space(COMM, p)
        for v in ker.basis_vectors:
            D = [RationalMatrix(2, 2, v[:4]), RationalMatrix(2, 2, v[4:])]
            lift = lift_deformation(COMM, p, D, 4)
            assert lift.status == "lifted"
            assert all(s.is_zero() for s in lift_residual(COMM, lift))


@pytest.mark.acceptance(7, "Hilb^1 equals Spec of the abelianization; Weyl has no 1-dim point")
def test_hilb1_abelianization():
    rng = random.Random(SEED)
    for name, P, _ in corpus_cases():
        valid = 0
        for _ in range(50):
            p = RepPoint(tuple(RationalMatrix(1, 1, [rng.randint(-2, 2)]) for _ in range(P.m)))
            valid += hilb1_points_check(P, p)
        if name == "weyl":
            assert valid == 0
    # exact reason: at n = 1 the single ideal generator is the nonzero constant -1
    (g,) = emit_ideal_generators(corpus_algebra("weyl"), 1)
    assert dict(g.polynomial.items()) == {(): -1}


def _report_signature(P, pr, res):
    rep = ext_dimensions(P, pr.point, res).as_dict()
    dim, _ = krylov_span(pr)
    cyc = dim == pr.n
    canon = hilb_canonical_form(pr) if cyc else None
    return rep, dim, cyc, canon


@pytest.mark.acceptance(8, "tangent/Ext dims, cyclicity and canonical form are conjugation invariant")
def test_orbit_invariance():
    rng = random.Random(SEED)
    man = load_manifest()
    for name, P, pts in corpus_cases():
        res = corpus_resolution(name, P) if name in man["resolutions"] else None
        for p in pts:
            v = tuple(rng.randint(-2, 2) for _ in range(p.n))
            pr = PointedRep(p, v)
            base = _report_signature(P, pr, res)
            for _ in range(20):
                g = GroupElement(rand_invertible(rng, p.n, lo=-3, hi=3))
                assert _report_signature(P, act(g, pr), res) == base


@pytest.mark.acceptance(9, "ideal generators vanish at valid points and reproduce check_point witnesses")
def test_ideal_point_consistency():
    rng = random.Random(SEED)
    man = load_manifest()
    for name, P, pts in corpus_cases():
        invalid = [corpus_point(f, P) for f in man["invalid_points"].get(name, [])]
        for n in (1, 2):
            gens = emit_ideal_generators(P, n)
            assert len(gens) == P.r * n * n
            for p in (x for x in pts if x.n == n):
                coords = p.coordinates()
                assert all(g.polynomial.evaluate(coords) == 0 for g in gens)
            if all(not g.polynomial for g in gens):
                # e.g. a commutator at n = 1: every point is valid
                continue
            seeded = None
            for _ in range(200):
                cand = rand_point(rng, P.m, n, lo=-3, hi=3)
                if not check_point(P, cand).valid:
                    seeded = cand
                    break
            assert seeded is not None
            for bad in [seeded] + [x for x in invalid if x.n == n]:
                values = {(g.relation, g.i, g.j): g.polynomial.evaluate(bad.coordinates()) for g in gens}
                check = check_point(P, bad)
                assert not check.valid and check.violations
                for w in check.violations:
                    assert values[(w.relation, w.i, w.j)] == w.value != 0


@pytest.mark.acceptance(10, "d1 d0 = 0 on the corpus; A2 resolution gives exact Ext^2 = 0 and a certificate")
def test_complex_identity():
    for _, P, pts in corpus_cases():
        for p in pts:
            cx = build_complex(P, p)
            assert (cx.d1 @ cx.d0).is_zero()
    P = corpus_algebra("a2")
    res = corpus_resolution("a2", P)
    for f in ("points/a2_p1.pt", "points/a2_semisimple.pt", "points/a2_n3.pt"):
        p = corpus_point(f, P)
        cx = build_complex(P, p, res)
        assert (cx.d2 @ cx.d1).is_zero()
        rep = ext_dimensions(P, p, res)
        assert (rep.ext2, rep.ext2_kind) == (0, "exact")
        assert smooth_certificate(P, p, assume_coherent=True, res2=res).status == "certified-smooth"
