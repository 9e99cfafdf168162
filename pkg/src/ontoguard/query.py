"""SPARQL-subset parser and evaluator.

Covers the query shapes the validation pipeline needs: SELECT over a basic
graph pattern with optional DISTINCT, a single COUNT aggregate, and numeric
FILTER comparisons. Conjunctive semantics only; no OPTIONAL/UNION/paths.
"""

from __future__ import annotations

import operator
import re
from dataclasses import dataclass, field

from .errors import QuerySyntaxError
from .rdf_io import PrefixMap, STANDARD_PREFIXES
from .store import Graph
from .terms import IRI, Literal, RDF_TYPE, Term


@dataclass(frozen=True)
class Variable:
    name: str  # without the leading '?'


@dataclass(frozen=True)
class TriplePattern:
    s: Term | Variable
    p: Term | Variable
    o: Term | Variable

    def variables(self) -> set[str]:
        return {t.name for t in (self.s, self.p, self.o) if isinstance(t, Variable)}


_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    "!=": operator.ne,
    ">=": operator.ge,
    ">": operator.gt,
}


@dataclass(frozen=True)
class Filter:
    variable: str
    op: str  # one of < <= = != >= >
    value: float

    def accepts(self, term: Term) -> bool:
        # non-numeric terms never satisfy a numeric comparison; the
        # candidate solution is dropped rather than failing the query
        if not isinstance(term, Literal):
            return False
        number = term.numeric_value()
        if number is None:
            return False
        return _OPS[self.op](number, self.value)


@dataclass
class Query:
    prefixes: PrefixMap
    projection: list[str]          # variable names, empty when aggregating
    aggregate: tuple[str, str] | None  # (counted variable, alias)
    distinct: bool
    patterns: list[TriplePattern]
    filters: list[Filter] = field(default_factory=list)


_Q_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<iriref><[^<>"{}|^`\\\s]*>)
      | (?P<string>"(?:[^"\\\n]|\\.)*")
      | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
      | (?P<decimal>[+-]?[0-9]+\.[0-9]+)
      | (?P<integer>[+-]?[0-9]+)
      | (?P<op><=|>=|!=|<|>|=)
      | (?P<pname>(?:[A-Za-z_][A-Za-z0-9_.-]*)?:(?:[A-Za-z_][A-Za-z0-9_-]*(?:\.[A-Za-z0-9_-]+)*)?)
      | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[{}().;,])
    """,
    re.VERBOSE,
)


class _QTok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _q_tokenize(text: str) -> list[_QTok]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _Q_TOKEN.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup not in ("ws", "comment"):
            tokens.append(_QTok(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_QTok("eof", "", pos))
    return tokens


class _QueryParser:
    def __init__(self, text: str, prefixes: dict[str, str] | None = None):
        self.tokens = _q_tokenize(text)
        self.pos = 0
        base = dict(STANDARD_PREFIXES)
        if prefixes:
            base.update(prefixes)
        self.prefixes = PrefixMap(base)

    def peek(self) -> _QTok:
        return self.tokens[self.pos]

    def next(self) -> _QTok:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok: _QTok):
        raise QuerySyntaxError(f"{message} (got {tok.text!r})", tok.pos)

    def keyword(self) -> str | None:
        tok = self.peek()
        if tok.kind == "word":
            return tok.text.upper()
        return None

    def expect_keyword(self, word: str):
        tok = self.next()
        if tok.kind != "word" or tok.text.upper() != word:
            self.fail(f"expected {word}", tok)

    def expect_punct(self, text: str):
        tok = self.next()
        if tok.kind != "punct" or tok.text != text:
            self.fail(f"expected {text!r}", tok)

    def parse(self) -> Query:
        while self.keyword() == "PREFIX":
            self.next()
            name = self.next()
            if name.kind != "pname" or not name.text.endswith(":"):
                self.fail("expected a prefix name", name)
            iri = self.next()
            if iri.kind != "iriref":
                self.fail("expected an IRI", iri)
            self.prefixes.bind(name.text[:-1], iri.text[1:-1])

        self.expect_keyword("SELECT")
        distinct = False
        if self.keyword() == "DISTINCT":
            self.next()
            distinct = True

        projection: list[str] = []
        aggregate = None
        tok = self.peek()
        if tok.kind == "punct" and tok.text == "(":
            self.next()
            self.expect_keyword("COUNT")
            self.expect_punct("(")
            if self.keyword() == "DISTINCT":
                self.next()
                distinct = True
            var = self.next()
            if var.kind != "var":
                self.fail("expected a variable in COUNT", var)
            self.expect_punct(")")
            self.expect_keyword("AS")
            alias = self.next()
            if alias.kind != "var":
                self.fail("expected an alias variable", alias)
            self.expect_punct(")")
            aggregate = (var.text[1:], alias.text[1:])
        else:
            while self.peek().kind == "var":
                projection.append(self.next().text[1:])
            if not projection:
                self.fail("expected projected variables or COUNT", self.peek())

        self.expect_keyword("WHERE")
        self.expect_punct("{")
        patterns: list[TriplePattern] = []
        filters: list[Filter] = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "}":
                self.next()
                break
            if self.keyword() == "FILTER":
                self.next()
                filters.append(self.parse_filter())
                continue
            patterns.append(self.parse_pattern())
        if self.peek().kind != "eof":
            self.fail("trailing input after query", self.peek())

        if not patterns:
            raise QuerySyntaxError("query needs at least one triple pattern")
        in_patterns = set().union(*(p.variables() for p in patterns))
        projected = list(projection) + ([aggregate[0]] if aggregate else [])
        for name in projected:
            if name not in in_patterns:
                raise QuerySyntaxError(
                    f"projected variable ?{name} does not appear in any pattern")
        for flt in filters:
            if flt.variable not in in_patterns:
                raise QuerySyntaxError(
                    f"filtered variable ?{flt.variable} does not appear in any pattern")
        return Query(self.prefixes, projection, aggregate, distinct, patterns, filters)

    def parse_term(self) -> Term | Variable:
        tok = self.next()
        if tok.kind == "var":
            return Variable(tok.text[1:])
        if tok.kind == "iriref":
            return IRI(tok.text[1:-1])
        if tok.kind == "pname":
            prefix = tok.text.partition(":")[0]
            if prefix not in self.prefixes:
                raise QuerySyntaxError(f"unknown prefix {prefix!r}", tok.pos)
            return IRI(self.prefixes.expand(tok.text))
        if tok.kind == "word" and tok.text == "a":
            return IRI(RDF_TYPE)
        if tok.kind == "string":
            return Literal(tok.text[1:-1])
        if tok.kind == "integer":
            return Literal(tok.text, "integer")
        if tok.kind == "decimal":
            return Literal(tok.text, "decimal")
        if tok.kind == "word" and tok.text in ("true", "false"):
            return Literal(tok.text, "boolean")
        self.fail("expected a term or variable", tok)

    def parse_pattern(self) -> TriplePattern:
        s = self.parse_term()
        p = self.parse_term()
        o = self.parse_term()
        tok = self.peek()
        if tok.kind == "punct" and tok.text == ".":
            self.next()
        return TriplePattern(s, p, o)

    def parse_filter(self) -> Filter:
        self.expect_punct("(")
        var = self.next()
        if var.kind != "var":
            self.fail("expected a variable in FILTER", var)
        op = self.next()
        if op.kind != "op":
            self.fail("expected a comparison operator", op)
        num = self.next()
        if num.kind not in ("integer", "decimal"):
            self.fail("expected a numeric literal", num)
        self.expect_punct(")")
        return Filter(var.text[1:], op.text, float(num.text))


def parse_query(text: str, prefixes: dict[str, str] | None = None) -> Query:
    """Parse query text; extra prefixes supplement any PREFIX declarations."""
    return _QueryParser(text, prefixes).parse()


def _substitute(pattern: TriplePattern, bindings: dict[str, Term]):
    def resolve(t):
        if isinstance(t, Variable):
            return bindings.get(t.name)
        return t
    return resolve(pattern.s), resolve(pattern.p), resolve(pattern.o)


def _solutions(query: Query, graph: Graph) -> list[dict[str, Term]]:
    remaining = list(query.patterns)
    solutions: list[dict[str, Term]] = [{}]
    bound: set[str] = set()
    while remaining:
        # cheapest-first: prefer patterns already constrained by bound
        # variables, then by match count with constants substituted
        def cost(pat: TriplePattern):
            s = None if isinstance(pat.s, Variable) else pat.s
            p = None if isinstance(pat.p, Variable) else pat.p
            o = None if isinstance(pat.o, Variable) else pat.o
            shares = bool(pat.variables() & bound)
            if isinstance(s, Literal) or isinstance(p, Literal):
                return (not shares, 0)
            return (not shares, graph.count(s, p, o))

        pattern = min(remaining, key=cost)
        remaining.remove(pattern)
        bound |= pattern.variables()
        next_solutions = []
        for bindings in solutions:
            s, p, o = _substitute(pattern, bindings)
            if isinstance(s, Literal) or isinstance(p, Literal):
                continue  # literals cannot occupy these positions
            for triple in graph.match(s, p, o):
                extended = dict(bindings)
                ok = True
                for slot, value in (("s", triple.subject), ("p", triple.predicate),
                                    ("o", triple.object)):
                    part = getattr(pattern, slot)
                    if isinstance(part, Variable):
                        existing = extended.get(part.name)
                        if existing is None:
                            extended[part.name] = value
                        elif existing != value:
                            ok = False
                            break
                if ok:
                    next_solutions.append(extended)
        solutions = next_solutions
        if not solutions:
            return []
    for flt in query.filters:
        solutions = [b for b in solutions if flt.accepts(b[flt.variable])]
    return solutions


def evaluate(query: Query, graph: Graph):
    """Solutions of the query over the graph.

    Returns an int for COUNT queries, otherwise a list of bindings
    (variable name -> Term) restricted to the projected variables.
    """
    solutions = _solutions(query, graph)
    if query.aggregate is not None:
        counted, _alias = query.aggregate
        if query.distinct:
            return len({b[counted] for b in solutions})
        return len(solutions)
    rows = [{name: b[name] for name in query.projection} for b in solutions]
    if query.distinct:
        seen = set()
        unique = []
        for row in rows:
            key = tuple(row[name] for name in query.projection)
            if key not in seen:
                seen.add(key)
                unique.append(row)
        rows = unique
    return rows
