"""Turtle-subset and N-Triples parsing and serialization.

Supported Turtle features: ``@prefix``, prefixed names, absolute IRIs in
angle brackets, string/integer/decimal/boolean literals, ``a`` as rdf:type,
``;`` and ``,`` lists, and ``#`` comments. Collections and blank nodes are
out of scope. Serialization is canonical (sorted, stable) so generated
files diff cleanly.
"""

from __future__ import annotations

import re
from typing import Iterable

from .errors import TurtleSyntaxError
from .store import Graph
from .terms import IRI, Literal, RDF_TYPE, Term, Triple

STANDARD_PREFIXES = {
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
    "xsd": "http://www.w3.org/2001/XMLSchema#",
}


class PrefixMap:
    """Bidirectional prefix <-> IRI base table."""

    def __init__(self, entries: dict[str, str] | None = None):
        self._entries: dict[str, str] = {}
        if entries:
            for prefix, base in entries.items():
                self.bind(prefix, base)

    def bind(self, prefix: str, base: str) -> None:
        self._entries[prefix] = base

    def __contains__(self, prefix: str) -> bool:
        return prefix in self._entries

    def __getitem__(self, prefix: str) -> str:
        return self._entries[prefix]

    def items(self):
        return self._entries.items()

    def as_dict(self) -> dict[str, str]:
        return dict(self._entries)

    def expand(self, prefixed: str) -> str:
        prefix, _, local = prefixed.partition(":")
        if prefix not in self._entries:
            raise KeyError(prefix)
        return self._entries[prefix] + local

    def compact(self, iri: str) -> str | None:
        """Prefixed form of an IRI, or None if no registered base applies."""
        best = None
        best_len = -1
        for prefix, base in sorted(self._entries.items()):
            if iri.startswith(base) and len(base) > best_len:
                local = iri[len(base):]
                if _LOCAL_NAME.fullmatch(local):
                    best = prefix
                    best_len = len(base)
        if best is None:
            return None
        return f"{best}:{iri[best_len:]}"


_LOCAL_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")

_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>\#[^\n]*)
      | (?P<iriref><[^<>"{}|^`\\\s]*>)
      | (?P<string>"(?:[^"\\\n]|\\.)*")
      | (?P<prefix_decl>@prefix\b)
      | (?P<langtag>@[A-Za-z][A-Za-z0-9-]*)
      | (?P<decimal>[+-]?[0-9]+\.[0-9]+)
      | (?P<integer>[+-]?[0-9]+)
      | (?P<dtype>\^\^)
      | (?P<pname>(?:[A-Za-z_][A-Za-z0-9_.-]*)?:(?:[A-Za-z_][A-Za-z0-9_-]*(?:\.[A-Za-z0-9_-]+)*)?)
      | (?P<keyword>\b(?:a|true|false)\b)
      | (?P<punct>[.;,])
    """,
    re.VERBOSE,
)

_STRING_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}


def _unescape(body: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            i += 1
            esc = body[i]
            if esc not in _STRING_ESCAPES:
                raise TurtleSyntaxError(f"unsupported string escape \\{esc}", line, col)
            out.append(_STRING_ESCAPES[esc])
        else:
            out.append(ch)
        i += 1
    return "".join(out)


def _escape(value: str) -> str:
    return (value.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t"))


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TurtleSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _TurtleParser:
    def __init__(self, text: str, prefixes: dict[str, str] | None = None):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.graph = Graph()
        if prefixes:
            self.graph.prefixes.update(prefixes)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token):
        raise TurtleSyntaxError(f"{message} (got {tok.text!r})", tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            self.fail(f"expected {text or kind}", tok)
        return tok

    def parse(self) -> Graph:
        while self.peek().kind != "eof":
            if self.peek().kind == "prefix_decl":
                self.parse_prefix()
            else:
                self.parse_triples()
        return self.graph

    def parse_prefix(self):
        self.next()
        name_tok = self.expect("pname")
        if not name_tok.text.endswith(":") or name_tok.text.count(":") != 1:
            self.fail("expected a prefix name ending in ':'", name_tok)
        iri_tok = self.expect("iriref")
        self.expect("punct", ".")
        self.graph.prefixes[name_tok.text[:-1]] = iri_tok.text[1:-1]

    def parse_iri(self) -> IRI:
        tok = self.next()
        if tok.kind == "iriref":
            return IRI(tok.text[1:-1])
        if tok.kind == "pname":
            prefix, _, local = tok.text.partition(":")
            if prefix not in self.graph.prefixes:
                raise TurtleSyntaxError(f"unknown prefix {prefix!r}", tok.line, tok.col)
            return IRI(self.graph.prefixes[prefix] + local)
        self.fail("expected an IRI", tok)

    def parse_object(self) -> Term:
        tok = self.peek()
        if tok.kind in ("iriref", "pname"):
            return self.parse_iri()
        tok = self.next()
        if tok.kind == "string":
            value = _unescape(tok.text[1:-1], tok.line, tok.col)
            nxt = self.peek()
            if nxt.kind == "langtag":
                self.next()
                return Literal(value, "string", nxt.text[1:])
            if nxt.kind == "dtype":
                self.next()
                dt = self.parse_iri()
                for name, iri in (("string", "string"), ("integer", "integer"),
                                  ("decimal", "decimal"), ("boolean", "boolean")):
                    if dt.value == f"http://www.w3.org/2001/XMLSchema#{iri}":
                        return Literal(value, name)
                raise TurtleSyntaxError(
                    f"unsupported datatype {dt.value}", tok.line, tok.col)
            return Literal(value, "string")
        if tok.kind == "integer":
            return Literal(tok.text, "integer")
        if tok.kind == "decimal":
            return Literal(tok.text, "decimal")
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            return Literal(tok.text, "boolean")
        self.fail("expected an IRI or literal", tok)

    def parse_predicate(self) -> IRI:
        tok = self.peek()
        if tok.kind == "keyword" and tok.text == "a":
            self.next()
            return IRI(RDF_TYPE)
        return self.parse_iri()

    def parse_triples(self):
        subject = self.parse_iri()
        while True:
            predicate = self.parse_predicate()
            while True:
                obj = self.parse_object()
                self.graph.insert(Triple(subject, predicate, obj))
                if self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    continue
                break
            tok = self.next()
            if tok.kind == "punct" and tok.text == ";":
                # tolerate a trailing ';' before '.'
                if self.peek().kind == "punct" and self.peek().text == ".":
                    self.next()
                    return
                continue
            if tok.kind == "punct" and tok.text == ".":
                return
            self.fail("expected ';' or '.'", tok)


def parse_turtle(text: str, prefixes: dict[str, str] | None = None) -> Graph:
    """Parse a Turtle document into a fresh Graph."""
    return _TurtleParser(text, prefixes).parse()


def _term_text(term: Term, pmap: PrefixMap) -> str:
    if isinstance(term, IRI):
        compact = pmap.compact(term.value)
        return compact if compact is not None else f"<{term.value}>"
    if term.datatype == "string":
        base = f'"{_escape(term.lexical)}"'
        return base + (f"@{term.lang}" if term.lang else "")
    # bare numeric / boolean forms reparse to the same typed literal
    return term.lexical


def serialize_turtle(graph: Graph | Iterable[Triple],
                     prefixes: PrefixMap | dict[str, str] | None = None) -> str:
    """Canonical Turtle: sorted prefix block, then one sorted triple per line."""
    if prefixes is None:
        prefixes = getattr(graph, "prefixes", {})
    pmap = prefixes if isinstance(prefixes, PrefixMap) else PrefixMap(prefixes)
    lines = [f"@prefix {prefix}: <{base}> ."
             for prefix, base in sorted(pmap.items())]
    if lines:
        lines.append("")
    for triple in sorted(graph, key=Triple.sort_key):
        if triple.predicate.value == RDF_TYPE:
            pred = "a"
        else:
            pred = _term_text(triple.predicate, pmap)
        lines.append(f"{_term_text(triple.subject, pmap)} {pred} "
                     f"{_term_text(triple.object, pmap)} .")
    return "\n".join(lines) + "\n"


def serialize_ntriples(graph: Graph | Iterable[Triple]) -> str:
    """N-Triples with full IRIs and explicit datatypes, sorted."""
    lines = []
    for triple in sorted(graph, key=Triple.sort_key):
        parts = []
        for term in (triple.subject, triple.predicate, triple.object):
            if isinstance(term, IRI):
                parts.append(f"<{term.value}>")
            elif term.lang:
                parts.append(f'"{_escape(term.lexical)}"@{term.lang}')
            elif term.datatype == "string":
                parts.append(f'"{_escape(term.lexical)}"')
            else:
                dt = f"http://www.w3.org/2001/XMLSchema#{term.datatype}"
                parts.append(f'"{_escape(term.lexical)}"^^<{dt}>')
        lines.append(" ".join(parts) + " .")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_ntriples(text: str) -> Graph:
    """N-Triples is a syntactic subset of the supported Turtle grammar."""
    return parse_turtle(text)


def load_graph(path) -> Graph:
    """Read a .ttl or .nt file into a Graph."""
    with open(path, encoding="utf-8") as handle:
        return parse_turtle(handle.read())
