"""RDF terms: IRIs, typed literals, and triples.

Terms compare by value and are hashable, so a plain set of triples gives
set semantics for free. Numeric literals are canonicalized at construction
so that equal values always share one lexical form.
"""

from __future__ import annotations

import decimal
import re
from dataclasses import dataclass, field

from .errors import GraphError

_WHITESPACE = re.compile(r"\s")

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

DATATYPE_IRIS = {
    "string": XSD + "string",
    "integer": XSD + "integer",
    "decimal": XSD + "decimal",
    "boolean": XSD + "boolean",
}


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __post_init__(self):
        if not self.value or _WHITESPACE.search(self.value):
            raise GraphError(f"invalid IRI: {self.value!r}")

    def sort_key(self):
        return (0, self.value, "", "")

    def __repr__(self):
        return f"<{self.value}>"


def _canonical_decimal(lexical: str) -> str:
    try:
        value = decimal.Decimal(lexical)
    except decimal.InvalidOperation:
        raise GraphError(f"invalid decimal literal: {lexical!r}") from None
    text = format(value.normalize(), "f")
    if "." not in text:
        text += ".0"
    return text


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = "string"  # string | integer | decimal | boolean
    lang: str | None = None

    def __post_init__(self):
        if self.datatype not in DATATYPE_IRIS:
            raise GraphError(f"unsupported literal datatype: {self.datatype!r}")
        if self.lang is not None and self.datatype != "string":
            raise GraphError("language tags only apply to string literals")
        if self.datatype == "integer":
            try:
                canonical = str(int(self.lexical, 10))
            except ValueError:
                raise GraphError(f"invalid integer literal: {self.lexical!r}") from None
            object.__setattr__(self, "lexical", canonical)
        elif self.datatype == "decimal":
            object.__setattr__(self, "lexical", _canonical_decimal(self.lexical))
        elif self.datatype == "boolean":
            if self.lexical not in ("true", "false"):
                raise GraphError(f"invalid boolean literal: {self.lexical!r}")

    @classmethod
    def string(cls, value: str, lang: str | None = None) -> "Literal":
        return cls(value, "string", lang)

    @classmethod
    def integer(cls, value: int) -> "Literal":
        return cls(str(int(value)), "integer")

    @classmethod
    def decimal(cls, value) -> "Literal":
        return cls(str(value), "decimal")

    @classmethod
    def boolean(cls, value: bool) -> "Literal":
        return cls("true" if value else "false", "boolean")

    def numeric_value(self):
        """Python number for integer/decimal literals, else None."""
        if self.datatype == "integer":
            return int(self.lexical)
        if self.datatype == "decimal":
            return float(self.lexical)
        return None

    def sort_key(self):
        return (1, self.lexical, self.datatype, self.lang or "")

    def __repr__(self):
        if self.datatype == "string":
            tag = f"@{self.lang}" if self.lang else ""
            return f'"{self.lexical}"{tag}'
        return f'"{self.lexical}"^^xsd:{self.datatype}'


Term = IRI | Literal


@dataclass(frozen=True, slots=True)
class Triple:
    subject: IRI
    predicate: IRI
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, IRI):
            raise GraphError(f"triple subject must be an IRI, got {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise GraphError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (IRI, Literal)):
            raise GraphError(f"triple object must be an IRI or literal, got {self.object!r}")

    def sort_key(self):
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())
