from fractions import Fraction

import pytest
import sympy

from ncrep.cohomology import (
    ResolutionStep,
    apply_d1,
    build_complex,
    deformation_check,
    dual_evaluation,
    ext_dimensions,
    lift_deformation,
    lift_residual,
    semicontinuity_scan,
    smooth_certificate,
    tangent_space,
)
from ncrep.errors import InvalidPointError, NotTangentError, ResolutionError
from ncrep.exactla import RationalMatrix
from ncrep.formats import parse_algebra
from ncrep.ncalg import BimoduleElement, Presentation
from ncrep.repscheme import GroupElement, RepPoint, conjugate

from conftest import (
    corpus_algebra,
    corpus_point,
    corpus_resolution,
    rand_invertible,
    rand_matrix,
    rand_point,
    relation_vanishing_at,
)

COMM = parse_algebra("generators x y\nrelations\n x*y - y*x\nend")
NILP = parse_algebra("generators x\nrelations\n x^2\nend")
FREE1 = Presentation(("x",))
FREE2 = Presentation(("x", "y"))
R = RationalMatrix.from_rows

P0 = RepPoint.of([[0, 0], [0, 1]], [[0, 0], [0, 0]])
ORIGIN = RepPoint.of([[0, 0], [0, 0]], [[0, 0], [0, 0]])


def sympy_tangent_dim(P, p):
    """Rank of the Jacobian of the entrywise relation map, computed with sympy."""
    n, m = p.n, p.m
    syms = [sympy.Matrix(n, n, lambda i, j, l=l: sympy.Symbol(f"s{l}_{i}_{j}")) for l in range(m)]
    flat = [s for M in syms for s in M]
    eqs = []
    for f in P.relations:
        out = sympy.zeros(n, n)
        for w, c in f.items():
            M = sympy.eye(n)
            for l in w:
                M = M * syms[l]
            out += sympy.Rational(c.numerator, c.denominator) * M
        eqs.extend(out)
    if not eqs:
        return m * n * n
    J = sympy.Matrix(eqs).jacobian(flat)
    subs = {}
    for l, X in enumerate(p.matrices):
        for i in range(n):
            for j in range(n):
                x = X[i, j]
                subs[syms[l][i, j]] = sympy.Rational(x.numerator, x.denominator)
    return m * n * n - J.subs(subs).rank()


def test_free_algebra_complex_has_no_d1():
    cx = build_complex(FREE2, RepPoint.of([[1, 2], [3, 4]], [[0, 1], [1, 0]]))
    assert cx.d1.shape == (0, 8)
    assert cx.d0.shape == (8, 4)


def test_commutator_d1_formula(rng):
    X, Y = P0.matrices
    for _ in range(5):
        Phi, Psi = rand_matrix(rng, 2), rand_matrix(rng, 2)
        (out,) = apply_d1(COMM, P0, [Phi, Psi])
        assert out == X @ Psi - Psi @ X + Phi @ Y - Y @ Phi


def test_d1_d0_vanishes_on_corpus(corpus):
    for _, P, pts in corpus:
        for p in pts:
            cx = build_complex(P, p)
            assert (cx.d1 @ cx.d0).is_zero()


def test_tangent_examples():
    assert tangent_space(FREE2, RepPoint.of([[1, 2], [3, 4]], [[5, 6], [7, 8]])).dimension == 8
    assert tangent_space(COMM, P0).dimension == 6
    assert sympy_tangent_dim(COMM, P0) == 6
    assert tangent_space(COMM, ORIGIN).dimension == 8


def test_tangent_matches_sympy_jacobian(rng):
    for _ in range(8):
        n = rng.randint(1, 2)
        p = rand_point(rng, 2, n, lo=-3, hi=3)
        P = Presentation(("x", "y"), (relation_vanishing_at(rng, p, 3),))
        assert tangent_space(P, p).dimension == sympy_tangent_dim(P, p)


def test_tangent_requires_valid_point():
    with pytest.raises(InvalidPointError):
        tangent_space(COMM, RepPoint.of([[0, 1], [0, 0]], [[0, 0], [1, 0]]))


def test_ext_examples():
    rep = ext_dimensions(FREE1, RepPoint.of([[1, 0], [0, 2]]))
    assert (rep.ext0, rep.ext1, rep.ext2, rep.ext2_kind) == (2, 2, 0, "exact")
    rep = ext_dimensions(COMM, P0)
    assert (rep.ext2, rep.ext2_kind) == (2, "upper_bound")
    rep = ext_dimensions(FREE2, RepPoint.of([[1, 1], [0, 1]], [[0, 0], [1, 0]]))
    assert (rep.ext2, rep.ext2_kind) == (0, "exact")


def test_ext_report_identities(corpus):
    for _, P, pts in corpus:
        for p in pts:
            rep = ext_dimensions(P, p)
            n2 = p.n * p.n
            assert rep.tangent_dim == rep.ext1 + rep.inner_dim
            assert rep.inner_dim == n2 - rep.ext0
            assert rep.ext0 >= 1
            assert min(rep.ext0, rep.ext1, rep.ext2, rep.tangent_dim, rep.inner_dim) >= 0


def test_smooth_certificate_examples(rng):
    v = smooth_certificate(FREE2, rand_point(rng, 2, 2), assume_coherent=True)
    assert v.certified and v.status == "certified-smooth"
    v = smooth_certificate(NILP, RepPoint.of([[0]]), assume_coherent=True)
    assert not v.certified and v.reason == "ext2-possibly-nonzero(bound=1)"
    v = smooth_certificate(FREE2, rand_point(rng, 2, 2))
    assert v.reason == "coherence-not-asserted"


def test_smooth_certificate_exact_nonzero():
    # a fake "resolution" with zero d2 leaves ext2 = coker d1 exactly
    zero_step = ResolutionStep(((BimoduleElement(),),))
    v = smooth_certificate(NILP, RepPoint.of([[0]]), True, zero_step)
    assert v.reason == "ext2-nonzero"


def test_deformation_check_examples(rng):
    assert deformation_check(COMM, P0, [RationalMatrix.zeros(2)] * 2)
    X, Y = P0.matrices
    for _ in range(3):
        B = rand_matrix(rng, 2)
        assert deformation_check(COMM, P0, [X @ B - B @ X, Y @ B - B @ Y])
    assert not deformation_check(COMM, P0, [RationalMatrix.zeros(2), R([[0, 1], [0, 0]])])


def test_dual_eps_part_equals_d1(rng):
    for _ in range(30):
        n = rng.randint(1, 3)
        p = rand_point(rng, 2, n, lo=-3, hi=3)
        P = Presentation(("x", "y"), (relation_vanishing_at(rng, p, 4),))
        D = [rand_matrix(rng, n) for _ in range(2)]
        eps = [v.eps for v in dual_evaluation(P, p, D)]
        assert eps == apply_d1(P, p, D)


def test_deformation_check_iff_in_tangent_span(rng):
    ker = tangent_space(COMM, P0)
    for _ in range(20):
        D = [rand_matrix(rng, 2, lo=-1, hi=1) for _ in range(2)]
        flat = D[0].vec() + D[1].vec()
        assert deformation_check(COMM, P0, D) == ker.contains(flat)


def test_tangent_dim_conjugation_invariant(rng):
    p = corpus_point("points/comm2_regular.pt")
    base = tangent_space(COMM, p).dimension
    for _ in range(20):
        g = GroupElement(rand_invertible(rng, 2))
        assert tangent_space(COMM, conjugate(p, g)).dimension == base


def test_lift_free_algebra_has_zero_corrections(rng):
    p = rand_point(rng, 2, 2)
    D = [rand_matrix(rng, 2) for _ in range(2)]
    lift = lift_deformation(FREE2, p, D, 5)
    assert lift.lifted
    for coeffs in lift.series:
        assert all(c.is_zero() for c in coeffs[2:])


def test_lift_scalar_commutator_all_orders(rng):
    p = RepPoint.of([[2]], [[7]])
    lift = lift_deformation(COMM, p, [R([[1]]), R([[-3]])], 6)
    assert lift.lifted


def test_lift_commuting_point_order_4():
    ker = tangent_space(COMM, P0)
    for v in ker.basis_vectors:
        D = [RationalMatrix(2, 2, v[:4]), RationalMatrix(2, 2, v[4:])]
        lift = lift_deformation(COMM, P0, D, 4)
        assert lift.lifted
        assert all(s.is_zero() for s in lift_residual(COMM, lift))


def test_lift_obstructed_square():
    lift = lift_deformation(NILP, RepPoint.of([[0]]), [R([[1]])], 3)
    assert not lift.lifted
    assert lift.obstructed_order == 2
    assert lift.obstruction == (Fraction(1),)


def test_lift_rejects_non_tangent():
    with pytest.raises(NotTangentError):
        lift_deformation(COMM, P0, [RationalMatrix.zeros(2), R([[0, 1], [0, 0]])], 3)


def test_lift_residual_vanishes_on_random_lifts(rng):
    # random relations of degree <= 3 through the point
    for _ in range(5):
        p = rand_point(rng, 2, 2, lo=-2, hi=2)
        P = Presentation(("x", "y"), (relation_vanishing_at(rng, p, 3),))
        ker = tangent_space(P, p)
        v = ker.basis_vectors[rng.randrange(ker.dimension)]
        D = [RationalMatrix(2, 2, v[:4]), RationalMatrix(2, 2, v[4:])]
        lift = lift_deformation(P, p, D, 4)
        if lift.lifted:
            assert all(s.is_zero() for s in lift_residual(P, lift))
        else:
            assert lift.certificate is not None


def test_semicontinuity_scan_family():
    fam = [(str(t), RepPoint.of([[0, 0], [0, t]], [[0, 0], [0, 0]]))
           for t in (Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(0))]
    rows = semicontinuity_scan(COMM, fam)
    assert [r.tangent_dim for r in rows] == [6, 6, 6, 8]
    assert [r.label for r in rows] == ["1", "1/2", "1/4", "0"]


def test_semicontinuity_scan_constant_and_free(rng):
    rows = semicontinuity_scan(COMM, [("a", P0), ("b", P0)])
    assert rows[0].as_dict() | {"label": "b"} == rows[1].as_dict()
    rows = semicontinuity_scan(FREE2, [(str(k), rand_point(rng, 2, 2)) for k in range(4)])
    assert {r.tangent_dim for r in rows} == {8}


def test_scan_invalid_point_reports_label():
    bad = RepPoint.of([[0, 1], [0, 0]], [[0, 0], [1, 0]])
    with pytest.raises(InvalidPointError, match="'oops'"):
        semicontinuity_scan(COMM, [("ok", P0), ("oops", bad)])


def test_a2_resolution_step():
    P = corpus_algebra("a2")
    res = corpus_resolution("a2", P)
    for f in ("points/a2_p1.pt", "points/a2_semisimple.pt", "points/a2_n3.pt", "points/a2_s1.pt"):
        p = corpus_point(f, P)
        cx = build_complex(P, p, res)
        assert (cx.d2 @ cx.d1).is_zero()
        rep = ext_dimensions(P, p, res)
        assert (rep.ext2, rep.ext2_kind) == (0, "exact")
    # the semisimple module S1 + S2 has a one-dimensional Ext^1 (the arrow)
    assert ext_dimensions(P, corpus_point("points/a2_semisimple.pt", P), res).ext1 == 1


def test_bad_resolution_step_rejected():
    P = corpus_algebra("a2")
    p = corpus_point("points/a2_p1.pt", P)
    one = BimoduleElement([((), (), 1)])
    with pytest.raises(ResolutionError) as err:
        build_complex(P, p, ResolutionStep(((one, BimoduleElement(), BimoduleElement()),)))
    assert err.value.witness["relation"] == 0
    with pytest.raises(ResolutionError):
        build_complex(P, p, ResolutionStep(((one,),)))
