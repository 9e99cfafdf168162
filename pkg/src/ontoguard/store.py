"""In-memory triple store with SPO/POS/OSP indexes and wildcard matching."""

from __future__ import annotations

from typing import Iterator

from .errors import GraphError
from .terms import IRI, Literal, Term, Triple


class Graph:
    """A set of triples with three-way indexing.

    Mutations happen during a build phase; ``seal()`` freezes the graph so it
    can be shared across concurrent read-only query evaluations. Iteration
    order from ``match`` is unspecified; callers needing determinism sort.
    """

    def __init__(self):
        self._triples: set[Triple] = set()
        # index maps: first key -> second key -> set of third position
        self._spo: dict[IRI, dict[IRI, set[Term]]] = {}
        self._pos: dict[IRI, dict[Term, set[IRI]]] = {}
        self._osp: dict[Term, dict[IRI, set[IRI]]] = {}
        # interning table: predicates and classes repeat heavily, so each
        # distinct term is stored once and reused
        self._interned: dict[Term, Term] = {}
        self.prefixes: dict[str, str] = {}
        self._sealed = False

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    @property
    def sealed(self) -> bool:
        return self._sealed

    def seal(self) -> "Graph":
        self._sealed = True
        return self

    def _intern(self, term: Term) -> Term:
        found = self._interned.get(term)
        if found is None:
            self._interned[term] = term
            return term
        return found

    def insert(self, triple: Triple) -> bool:
        """Add a triple; returns False if it was already present."""
        if self._sealed:
            raise GraphError("cannot insert into a sealed graph")
        if not isinstance(triple, Triple):
            raise GraphError(f"not a triple: {triple!r}")
        if triple in self._triples:
            return False
        s = self._intern(triple.subject)
        p = self._intern(triple.predicate)
        o = self._intern(triple.object)
        triple = Triple(s, p, o)
        self._triples.add(triple)
        self._spo.setdefault(s, {}).setdefault(p, set()).add(o)
        self._pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._osp.setdefault(o, {}).setdefault(s, set()).add(p)
        return True

    def add(self, subject: IRI, predicate: IRI, obj: Term) -> bool:
        return self.insert(Triple(subject, predicate, obj))

    def remove(self, triple: Triple) -> bool:
        """Remove a triple; returns False if it was not present."""
        if self._sealed:
            raise GraphError("cannot remove from a sealed graph")
        if triple not in self._triples:
            return False
        self._triples.discard(triple)
        s, p, o = triple.subject, triple.predicate, triple.object

        def _drop(index, a, b, c):
            second = index[a]
            second[b].discard(c)
            if not second[b]:
                del second[b]
            if not second:
                del index[a]

        _drop(self._spo, s, p, o)
        _drop(self._pos, p, o, s)
        _drop(self._osp, o, s, p)
        return True

    def update(self, triples) -> int:
        added = 0
        for triple in triples:
            added += self.insert(triple)
        return added

    def match(self, s: IRI | None = None, p: IRI | None = None,
              o: Term | None = None) -> Iterator[Triple]:
        """Yield triples matching the pattern; None is a wildcard.

        The result is identical regardless of which index serves the lookup.
        """
        if s is not None and p is not None and o is not None:
            triple = Triple(s, p, o)
            if triple in self._triples:
                yield triple
            return
        if s is not None and p is not None:
            for obj in self._spo.get(s, {}).get(p, ()):
                yield Triple(s, p, obj)
        elif p is not None and o is not None:
            for subj in self._pos.get(p, {}).get(o, ()):
                yield Triple(subj, p, o)
        elif s is not None and o is not None:
            for pred in self._osp.get(o, {}).get(s, ()):
                yield Triple(s, pred, o)
        elif s is not None:
            for pred, objs in self._spo.get(s, {}).items():
                for obj in objs:
                    yield Triple(s, pred, obj)
        elif p is not None:
            for obj, subjs in self._pos.get(p, {}).items():
                for subj in subjs:
                    yield Triple(subj, p, obj)
        elif o is not None:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
        else:
            yield from self._triples

    def count(self, s: IRI | None = None, p: IRI | None = None,
              o: Term | None = None) -> int:
        """Number of triples matching the pattern (cheap for indexed shapes)."""
        if s is None and p is None and o is None:
            return len(self._triples)
        if s is not None and p is not None and o is not None:
            return 1 if Triple(s, p, o) in self._triples else 0
        if s is not None and p is not None:
            return len(self._spo.get(s, {}).get(p, ()))
        if p is not None and o is not None:
            return len(self._pos.get(p, {}).get(o, ()))
        if s is not None and o is not None:
            return len(self._osp.get(o, {}).get(s, ()))
        if s is not None:
            return sum(len(objs) for objs in self._spo.get(s, {}).values())
        if p is not None:
            return sum(len(subjs) for subjs in self._pos.get(p, {}).values())
        return sum(len(preds) for preds in self._osp.get(o, {}).values())

    def subjects(self, p: IRI | None = None, o: Term | None = None) -> set[IRI]:
        return {t.subject for t in self.match(None, p, o)}

    def objects(self, s: IRI | None = None, p: IRI | None = None) -> set[Term]:
        return {t.object for t in self.match(s, p, None)}
