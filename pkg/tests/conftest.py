import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from ncrep.exactla import RationalMatrix, kernel, rank
from ncrep.formats import load_algebra, parse_point, parse_resolution
from ncrep.ncalg import NCPolynomial, words_up_to
from ncrep.repscheme import RepPoint

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load_manifest():
    return json.loads((CORPUS / "manifest.json").read_text())


def corpus_algebra(name):
    return load_algebra(CORPUS / load_manifest()["algebras"][name])


def corpus_point(rel, P=None):
    return parse_point((CORPUS / rel).read_text(), None if P is None else P.m)


def corpus_resolution(name, P):
    return parse_resolution((CORPUS / load_manifest()["resolutions"][name]).read_text(), P)


def corpus_cases():
    """(name, presentation, [valid points]) for every corpus algebra."""
    man = load_manifest()
    out = []
    for name in man["algebras"]:
        P = corpus_algebra(name)
        pts = [corpus_point(f, P) for f in man["valid_points"][name]]
        out.append((name, P, pts))
    return out


def rand_matrix(rng, n, cols=None, lo=-9, hi=9):
    cols = n if cols is None else cols
    return RationalMatrix(n, cols, [rng.randint(lo, hi) for _ in range(n * cols)])


def rand_invertible(rng, n, lo=-5, hi=5):
    while True:
        g = rand_matrix(rng, n, lo=lo, hi=hi)
        if rank(g) == n:
            return g


def rand_point(rng, m, n, lo=-5, hi=5):
    return RepPoint(tuple(rand_matrix(rng, n, lo=lo, hi=hi) for _ in range(m)))


def rand_poly(rng, m, degree, nterms=5, lo=-5, hi=5):
    words = words_up_to(m, degree)
    return NCPolynomial((rng.choice(words), rng.randint(lo, hi)) for _ in range(nterms))


def relation_vanishing_at(rng, p: RepPoint, degree: int = 4) -> NCPolynomial:
    """A random nonzero polynomial of degree <= ``degree`` with f(p) = 0.

    The evaluation map from words of bounded length to M_n is linear; once
    there are more words than n^2 it has a kernel, and any kernel vector is a
    relation satisfied at p.
    """
    from ncrep.ncalg import substitute_words

    words = words_up_to(p.m, degree)
    cols = [substitute_words(w, p.matrices, p.n).entries for w in words]
    M = RationalMatrix.from_columns(cols, rows=p.n * p.n)
    ker = kernel(M)
    assert ker.dimension > 0
    while True:
        picks = rng.sample(range(ker.dimension), min(3, ker.dimension))
        coeffs = {}
        for k in picks:
            c = rng.randint(-3, 3) or 1
            for w, x in zip(words, ker.basis_vectors[k]):
                if x:
                    coeffs[w] = coeffs.get(w, Fraction(0)) + c * x
        f = NCPolynomial(coeffs)
        if f:
            return f


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def comm2():
    return corpus_algebra("comm2")


@pytest.fixture
def corpus():
    return corpus_cases()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(ordinal, label): end-to-end acceptance check")


_ACCEPTANCE = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            _ACCEPTANCE[item.nodeid] = mark.args


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.nodeid in _ACCEPTANCE and (report.when == "call" or report.failed):
        item.config._acceptance_outcomes = getattr(item.config, "_acceptance_outcomes", {})
        prev = item.config._acceptance_outcomes.get(item.nodeid, "PASS")
        item.config._acceptance_outcomes[item.nodeid] = "FAIL" if report.failed or prev == "FAIL" else "PASS"


def pytest_terminal_summary(terminalreporter, config):
    outcomes = getattr(config, "_acceptance_outcomes", {})
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (ordinal, label) in sorted(_ACCEPTANCE.items(), key=lambda kv: kv[1][0]):
        if nodeid in outcomes:
            terminalreporter.write_line(f"{outcomes[nodeid]} [{ordinal:2d}] {label}")
