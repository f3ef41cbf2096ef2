"""Text formats: algebra files, point/vector files, resolution steps, families, ideals.

Algebra file grammar (``#`` starts a comment)::

    [algebra NAME]
    generators NAME+
    [relations
      POLY          one relation per line
      ...
    end]

    POLY   := [+|-] TERM ((+|-) TERM)*
    TERM   := FACTOR (* FACTOR)*
    FACTOR := ATOM [^ INT]
    ATOM   := INT [/ INT] | NAME | ( POLY )
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import ParseError
from .exactla import RationalMatrix
from .ncalg import BimoduleElement, NCPolynomial, Presentation, Word, format_poly, format_word
from .repscheme import CommPolynomial, GenericVariable, IdealGenerator, RepPoint

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9']*)|(?P<op>[-+*/^()|,]))")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9']*\Z")
_KEYWORDS = {"algebra", "generators", "relations", "end"}


@dataclass
class _Tok:
    kind: str  # "num" | "name" | op character | "eol"
    text: str
    col: int


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _tokenize(text: str, lineno: int, col0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        mo = _TOKEN.match(text, pos)
        if mo is None or mo.end() == pos:
            col = pos + col0 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r}", lineno, col,
                             ("number", "identifier", "operator"))
        kind = mo.lastgroup
        toks.append(_Tok(kind if kind != "op" else mo.group(kind), mo.group(kind), mo.start(kind) + col0))
        pos = mo.end()
    toks.append(_Tok("eol", "", len(text) + col0))
    return toks


class _PolyParser:
    def __init__(self, toks: list[_Tok], lineno: int, names: Sequence[str]):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.index = {nm: k for k, nm in enumerate(names)}

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, expected) -> ParseError:
        return ParseError(msg, self.lineno, self.cur.col, expected)

    def take(self, kind: str) -> _Tok:
        if self.cur.kind != kind:
            shown = self.cur.text or "end of line"
            raise self.error(f"unexpected {shown!r}", (repr(kind) if len(kind) == 1 else kind,))
        tok = self.cur
        self.i += 1
        return tok

    def parse(self) -> NCPolynomial:
        f = self.poly()
        if self.cur.kind != "eol":
            raise self.error(f"unexpected {self.cur.text!r}", ("'+'", "'-'", "'*'", "end of line"))
        return f

    def poly(self) -> NCPolynomial:
        sign = 1
        if self.cur.kind in ("+", "-"):
            sign = -1 if self.take(self.cur.kind).kind == "-" else 1
        f = self.term().scale(sign)
        while self.cur.kind in ("+", "-"):
            op = self.take(self.cur.kind).kind
            t = self.term()
            f = f + t if op == "+" else f - t
        return f

    def term(self) -> NCPolynomial:
        f = self.factor()
        while self.cur.kind == "*":
            self.take("*")
            f = f * self.factor()
        return f

    def factor(self) -> NCPolynomial:
        f = self.atom()
        if self.cur.kind == "^":
            self.take("^")
            k = int(self.take("num").text)
            if k < 1:
                raise ParseError("exponent must be a positive integer", self.lineno, self.toks[self.i - 1].col)
            f = f ** k
        return f

    def atom(self) -> NCPolynomial:
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            c = Fraction(int(tok.text))
            if self.cur.kind == "/":
                self.take("/")
                den = self.take("num")
                if int(den.text) == 0:
                    raise ParseError("zero denominator", self.lineno, den.col)
                c = Fraction(int(tok.text), int(den.text))
            return NCPolynomial.constant(c)
        if tok.kind == "name":
            if tok.text not in self.index:
                raise ParseError(f"unknown identifier {tok.text!r}", self.lineno, tok.col,
                                 tuple(self.index))
            self.i += 1
            return NCPolynomial.generator(self.index[tok.text])
        if tok.kind == "(":
            self.take("(")
            f = self.poly()
            self.take(")")
            return f
        raise self.error(f"unexpected {tok.text or 'end of line'!r}", ("number", "identifier", "'('"))


def parse_poly(text: str, names: Sequence[str], lineno: int = 1, col0: int = 1) -> NCPolynomial:
    return _PolyParser(_tokenize(text, lineno, col0), lineno, names).parse()


@dataclass
class AlgebraFile:
    """A parsed algebra plus the source line of each relation."""

    presentation: Presentation
    relation_lines: list[int] = field(default_factory=list)
    source: str | None = None


def parse_algebra_file(text: str, source: str | None = None) -> AlgebraFile:
    name = None
    names: list[str] | None = None
    relations: list[NCPolynomial] = []
    rel_lines: list[int] = []
    state = "header"  # header -> generators seen -> relations -> done
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        head, _, rest = stripped.partition(" ")
        rest_col = indent + len(head) + 2
        if state == "relations":
            if stripped == "end":
                state = "done"
                continue
            relations.append(parse_poly(line, names, lineno))
            rel_lines.append(lineno)
            continue
        if state == "done":
            raise ParseError(f"unexpected {head!r} after 'end'", lineno, indent + 1, ("end of file",))
        if head == "algebra" and state == "header" and name is None:
            parts = rest.split()
            if len(parts) != 1 or not _NAME.match(parts[0]):
                raise ParseError("expected a single algebra name", lineno, rest_col, ("identifier",))
            name = parts[0]
        elif head == "generators" and names is None:
            parts = rest.split()
            if not parts:
                raise ParseError("no generators listed", lineno, rest_col, ("identifier",))
            seen = set()
            col = rest_col
            for p in parts:
                col = line.index(p, col - 1) + 1
                if not _NAME.match(p) or p in _KEYWORDS:
                    raise ParseError(f"invalid generator name {p!r}", lineno, col, ("identifier",))
                if p in seen:
                    raise ParseError(f"duplicate generator name {p!r}", lineno, col)
                seen.add(p)
            names = parts
            state = "generators"
        elif head == "relations" and not rest.strip():
            if names is None:
                raise ParseError("generators section missing", lineno, indent + 1, ("generators",))
            state = "relations"
        elif head == "end" and names is not None and not rest.strip():
            state = "done"
        else:
            if names is None:
                expected = ("algebra", "generators") if name is None else ("generators",)
                raise ParseError(f"unexpected {head!r}", lineno, indent + 1, expected)
            raise ParseError(f"unexpected {head!r}", lineno, indent + 1, ("relations", "end"))
    if names is None:
        raise ParseError("generators section missing", last_line + 1, 1, ("generators",))
    if state == "relations":
        raise ParseError("unterminated relations section", last_line + 1, 1, ("end",))
    return AlgebraFile(Presentation(tuple(names), tuple(relations), name), rel_lines, source)


def parse_algebra(text: str) -> Presentation:
    return parse_algebra_file(text).presentation


def format_algebra(P: Presentation) -> str:
    lines = []
    if P.name:
        lines.append(f"algebra {P.name}")
    lines.append("generators " + " ".join(P.generator_names))
    lines.append("relations")
    for f in P.relations:
        lines.append("  " + format_poly(f, P.generator_names))
    lines.append("end")
    return "\n".join(lines) + "\n"


def load_algebra(path) -> Presentation:
    path = Path(path)
    af = parse_algebra_file(path.read_text(), str(path))
    P = af.presentation
    if P.name is None:
        P = Presentation(P.generator_names, P.relations, path.stem)
    return P


# points, vectors, directions

def _rational(tok: str, lineno: int, col: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {tok!r}", lineno, col, ("p/q",)) from None


def _numeric_rows(text: str) -> list[tuple[int, list[Fraction]]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        vals = []
        for mo in re.finditer(r"\S+", line):
            vals.append(_rational(mo.group(), lineno, mo.start() + 1))
        rows.append((lineno, vals))
    return rows


def parse_point(text: str, m: int | None = None) -> RepPoint:
    """``n`` on the first line, then m blocks of n rows of rationals."""
    rows = _numeric_rows(text)
    if not rows:
        raise ParseError("empty point file", 1, 1, ("n",))
    lineno, first = rows[0]
    if len(first) != 1 or first[0].denominator != 1 or first[0] < 1:
        raise ParseError("first line must be the dimension n", lineno, 1, ("positive integer",))
    n = int(first[0])
    body = rows[1:]
    for ln, vals in body:
        if len(vals) != n:
            raise ParseError(f"expected {n} entries per row, got {len(vals)}", ln, 1)
    if len(body) % n:
        ln = body[-1][0] if body else lineno
        raise ParseError(f"number of matrix rows ({len(body)}) is not a multiple of n = {n}", ln, 1)
    k = len(body) // n
    if m is not None and k != m:
        raise ParseError(f"point has {k} matrices but the algebra has {m} generators", lineno, 1)
    mats = tuple(
        RationalMatrix.from_rows([vals for _, vals in body[b * n:(b + 1) * n]], cols=n) for b in range(k)
    )
    return RepPoint(mats)


def format_point(p: RepPoint, names: Sequence[str] | None = None) -> str:
    lines = [str(p.n)]
    for l, X in enumerate(p.matrices):
        if names is not None:
            lines.append(f"# {names[l]}")
        for i in range(X.rows):
            lines.append(" ".join(str(x) for x in X.row(i)))
    return "\n".join(lines) + "\n"


def parse_vector(text: str) -> tuple[Fraction, ...]:
    rows = _numeric_rows(text)
    if len(rows) != 1:
        raise ParseError("a vector file holds exactly one row", rows[1][0] if len(rows) > 1 else 1, 1)
    return tuple(rows[0][1])


def format_vector(v: Sequence[Fraction]) -> str:
    return " ".join(str(x) for x in v) + "\n"


# resolution steps

def _parse_word(text: str, names: Sequence[str], lineno: int, col: int) -> Word:
    text = text.strip()
    if text == "1":
        return ()
    f = parse_poly(text, names, lineno, col)
    if len(f) != 1:
        raise ParseError(f"expected a word, got {text!r}", lineno, col, ("word", "1"))
    (w, c), = f.items()
    if c != 1:
        raise ParseError(f"expected a word, got {text!r}", lineno, col, ("word", "1"))
    return w


_BIM_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*\(([^|()]*)\|([^|()]*)\)\s*")


def parse_bimodule_element(text: str, names: Sequence[str], lineno: int = 1, col0: int = 1) -> BimoduleElement:
    """``coeff (left | right)`` terms joined by + / -; ``0`` is the zero element."""
    if text.strip() == "0":
        return BimoduleElement()
    pos = 0
    out = []
    while pos < len(text):
        mo = _BIM_TERM.match(text, pos)
        if mo is None or mo.end() == pos:
            raise ParseError(f"cannot parse bimodule term at {text[pos:].strip()!r}", lineno, pos + col0,
                             ("coeff (left | right)", "0"))
        if out and mo.group(1) is None:
            raise ParseError("missing '+' or '-' between terms", lineno, pos + col0, ("'+'", "'-'"))
        c = Fraction(mo.group(2)) if mo.group(2) else Fraction(1)
        if mo.group(1) == "-":
            c = -c
        u = _parse_word(mo.group(3), names, lineno, mo.start(3) + col0)
        w = _parse_word(mo.group(4), names, lineno, mo.start(4) + col0)
        out.append((u, w, c))
        pos = mo.end()
    return BimoduleElement(out)


def format_bimodule_element(e: BimoduleElement, names: Sequence[str]) -> str:
    if not e:
        return "0"
    parts = []
    for k, (u, w, c) in enumerate(e):
        sign = "-" if c < 0 else "+"
        body = f"{abs(c)} ({format_word(u, names)} | {format_word(w, names)})"
        parts.append((("- " if sign == "-" else "") if k == 0 else f" {sign} ") + body)
    return "".join(parts)


def parse_resolution(text: str, P: Presentation):
    """One row per line, the r entries of a row separated by ``;``."""
    from .cohomology import ResolutionStep

    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        entries = []
        col = 1
        for piece in line.split(";"):
            entries.append(parse_bimodule_element(piece, P.generator_names, lineno, col))
            col += len(piece) + 1
        if len(entries) != P.r:
            raise ParseError(f"row has {len(entries)} entries, expected r = {P.r}", lineno, 1)
        rows.append(tuple(entries))
    return ResolutionStep(tuple(rows))


def format_resolution(res, P: Presentation) -> str:
    return "\n".join(
        " ; ".join(format_bimodule_element(e, P.generator_names) for e in row) for row in res.entries
    ) + "\n"


# families

def parse_family(text: str, base: Path | None = None, m: int | None = None) -> list[tuple[str, RepPoint]]:
    """Lines ``label: <point file>``; relative paths resolve against ``base``."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        label, sep, path = line.partition(":")
        if not sep or not label.strip() or not path.strip():
            raise ParseError("expected 'label: <point file>'", lineno, 1, ("label: path",))
        target = Path(path.strip())
        if base is not None and not target.is_absolute():
            target = base / target
        try:
            text_pt = target.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read point file {str(target)!r}: {exc.strerror}", lineno,
                             line.index(path.strip()) + 1) from None
        out.append((label.strip(), parse_point(text_pt, m)))
    return out


# ideals

def format_ideal(gens: Sequence[IdealGenerator], names: Sequence[str]) -> str:
    lines = []
    for g in gens:
        lines.append(f"# relation {g.relation}, entry ({g.i},{g.j})")
        lines.append(g.polynomial.format(names))
    return "\n".join(lines) + ("\n" if lines else "")


_XI = re.compile(r"xi\[([^,\]]+),(\d+),(\d+)\](?:\^(\d+))?")


def parse_comm_poly(text: str, names: Sequence[str]) -> CommPolynomial:
    """Inverse of :meth:`CommPolynomial.format`."""
    index = {nm: k for k, nm in enumerate(names)}
    text = text.strip()
    if text == "0":
        return CommPolynomial()
    terms = []
    for mo in re.finditer(r"(^|[+-])\s*([^+-]+)", text):
        sign = -1 if mo.group(1) == "-" else 1
        factors = [f.strip() for f in mo.group(2).split("*")]
        c = Fraction(factors[0]) * sign
        mono = []
        for f in factors[1:]:
            x = _XI.fullmatch(f)
            if x is None:
                raise ParseError(f"bad variable {f!r}", 1, mo.start(2) + 1, ("xi[g,i,j]",))
            v = GenericVariable(index[x.group(1)], int(x.group(2)), int(x.group(3)))
            mono.append((v, int(x.group(4) or 1)))
        terms.append((tuple(mono), c))
    return CommPolynomial(terms)


def parse_ideal(text: str, names: Sequence[str]) -> list[IdealGenerator]:
    out = []
    label = None
    hdr = re.compile(r"#\s*relation\s+(\d+),\s*entry\s*\((\d+),(\d+)\)")
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        mo = hdr.match(line)
        if mo:
            label = tuple(int(g) for g in mo.groups())
            continue
        k, i, j = label if label is not None else (-1, 0, 0)
        out.append(IdealGenerator(k, i, j, parse_comm_poly(line, names)))
        label = None
    return out
