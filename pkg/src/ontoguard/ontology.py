"""Typed view over loaded ontology graphs.

Builds the class hierarchy with materialized transitive closure, extracts
quality-bin individuals with their numeric ranges, and resolves intended
class distributions. The three bundled ontologies live in ``data/``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

from .errors import SchemaError
from .rdf_io import load_graph, parse_turtle
from .store import Graph
from .terms import IRI, Literal, RDF_TYPE, Triple

RDFS_SUBCLASS = IRI("http://www.w3.org/2000/01/rdf-schema#subClassOf")
RDFS_LABEL = IRI("http://www.w3.org/2000/01/rdf-schema#label")
OWL_INVERSE = IRI("http://www.w3.org/2002/07/owl#inverseOf")
OWL_CLASS = IRI("http://www.w3.org/2002/07/owl#Class")
OWL_OBJECT_PROPERTY = IRI("http://www.w3.org/2002/07/owl#ObjectProperty")

BFO_NS = "http://purl.obolibrary.org/obo/"
DOMAIN_NS = "http://w3id.org/ontoguard/domain#"
QUALITY_NS = "http://w3id.org/ontoguard/quality#"
DATA_NS = "http://w3id.org/ontoguard/data#"

PART_OF = IRI(BFO_NS + "BFO_0000050")
HAS_PART = IRI(BFO_NS + "BFO_0000051")
CONTAINED_IN = IRI(BFO_NS + "BFO_0000082")
CONTAINS = IRI(BFO_NS + "BFO_0000083")

IMAGE_CLASS = IRI(DOMAIN_NS + "Image")
BOX_CLASS = IRI(DOMAIN_NS + "Bounding_Box")
WIDTH = IRI(DOMAIN_NS + "width")
HEIGHT = IRI(DOMAIN_NS + "height")
BOX_X = IRI(DOMAIN_NS + "x")
BOX_Y = IRI(DOMAIN_NS + "y")
BOX_W = IRI(DOMAIN_NS + "w")
BOX_H = IRI(DOMAIN_NS + "h")
SHOWS = IRI(DOMAIN_NS + "shows")

TAXONOMY_ROOT = IRI(DOMAIN_NS + "taxonomy_root")
INTENDED_SHARE = IRI(DOMAIN_NS + "intended_share")
CHARACTERISTIC_ROOT = IRI(QUALITY_NS + "characteristic_root")
LOWER_BOUND = IRI(QUALITY_NS + "lower_bound")
UPPER_BOUND = IRI(QUALITY_NS + "upper_bound")
UNIT = IRI(QUALITY_NS + "unit")
BIN_ORDER = IRI(QUALITY_NS + "bin_order")
OUT_OF_RANGE = IRI(QUALITY_NS + "out_of_range")
BIN_REQUIRED = IRI(QUALITY_NS + "required")
TARGET_SHARE = IRI(QUALITY_NS + "target_share")

TRUE = Literal.boolean(True)


def local_name(iri: IRI) -> str:
    value = iri.value
    for sep in ("#", "/"):
        if sep in value:
            value = value.rsplit(sep, 1)[1]
            break
    return value


@dataclass(frozen=True)
class QualityBin:
    iri: IRI
    characteristic: str        # local name of the characteristic class
    name: str                  # local name of the bin individual
    lower: float | None        # None only for out-of-range markers
    upper: float | None        # None = unbounded above
    unit: str
    required: bool
    target_share: float | None
    out_of_range: bool
    order: int

    def contains(self, value: float) -> bool:
        if self.out_of_range:
            return False
        if value < self.lower:
            return False
        return self.upper is None or value < self.upper


@dataclass
class OntologySchema:
    graph: Graph
    prefixes: dict[str, str]
    classes: set[IRI]
    parents: dict[IRI, set[IRI]]
    roots: list[IRI]
    categories: list[IRI]
    intended_distribution: dict[IRI, float]
    bins: dict[str, list[QualityBin]]          # characteristic -> ordered bins
    oor_bins: dict[str, QualityBin]            # characteristic -> marker
    bin_by_name: dict[str, QualityBin]
    class_by_name: dict[str, IRI]
    inverses: dict[IRI, IRI]
    relation_names: dict[str, IRI]
    _ancestors: dict[IRI, set[IRI]] = field(default_factory=dict)
    _descendants: dict[IRI, set[IRI]] = field(default_factory=dict)

    @property
    def characteristics(self) -> list[str]:
        return sorted(self.bins)

    def ancestors(self, cls: IRI) -> set[IRI]:
        if cls not in self.classes:
            raise SchemaError(f"unknown class {cls.value}")
        return set(self._ancestors.get(cls, set()))

    def descendants(self, cls: IRI) -> set[IRI]:
        if cls not in self.classes:
            raise SchemaError(f"unknown class {cls.value}")
        return set(self._descendants.get(cls, set()))

    def bin_for(self, characteristic: str, value: float) -> QualityBin:
        """The unique bin containing value, else the out-of-range marker."""
        if characteristic not in self.bins:
            raise SchemaError(f"unknown quality characteristic {characteristic!r}")
        if not math.isfinite(value) or value < 0:
            raise SchemaError(f"quality value must be finite and non-negative: {value!r}")
        for qbin in self.bins[characteristic]:
            if qbin.contains(value):
                return qbin
        return self.oor_bins[characteristic]


def _float_object(triple_obj) -> float | None:
    if isinstance(triple_obj, Literal):
        return triple_obj.numeric_value()
    return None


def _closure(parents: dict[IRI, set[IRI]]) -> dict[IRI, set[IRI]]:
    memo: dict[IRI, set[IRI]] = {}
    in_progress: list[IRI] = []

    def visit(node: IRI) -> set[IRI]:
        if node in memo:
            return memo[node]
        if node in in_progress:
            cycle = in_progress[in_progress.index(node):] + [node]
            names = " -> ".join(local_name(n) for n in cycle)
            raise SchemaError(f"cycle in subclass hierarchy: {names}")
        in_progress.append(node)
        result: set[IRI] = set()
        for parent in parents.get(node, ()):
            result.add(parent)
            result |= visit(parent)
        in_progress.pop()
        memo[node] = result
        return result

    for node in list(parents):
        visit(node)
    return memo


def load_schema(graphs: list[Graph]) -> OntologySchema:
    """Merge ontology graphs into one schema with materialized closure."""
    merged = Graph()
    for graph in graphs:
        merged.prefixes.update(graph.prefixes)
        merged.update(graph)

    # class hierarchy
    parents: dict[IRI, set[IRI]] = {}
    classes: set[IRI] = set(merged.subjects(IRI(RDF_TYPE), OWL_CLASS))
    for triple in merged.match(None, RDFS_SUBCLASS, None):
        parents.setdefault(triple.subject, set()).add(triple.object)
        classes.add(triple.subject)
        classes.add(triple.object)
    ancestors = _closure(parents)
    for cls in classes:
        ancestors.setdefault(cls, set())
    descendants: dict[IRI, set[IRI]] = {cls: set() for cls in classes}
    for child, ancs in ancestors.items():
        for anc in ancs:
            descendants.setdefault(anc, set()).add(child)

    # materialize the closure as derived subclass triples so single-pattern
    # queries see transitive ancestry without path support
    for child, ancs in ancestors.items():
        for anc in ancs:
            merged.insert(Triple(child, RDFS_SUBCLASS, anc))

    # inverse relations, materialized both ways
    inverses: dict[IRI, IRI] = {}
    for triple in merged.match(None, OWL_INVERSE, None):
        inverses[triple.subject] = triple.object
        inverses[triple.object] = triple.subject
    for rel, inv in list(inverses.items()):
        for triple in list(merged.match(None, rel, None)):
            if isinstance(triple.object, IRI):
                merged.insert(Triple(triple.object, inv, triple.subject))

    relation_names: dict[str, IRI] = {}
    for prop in merged.subjects(IRI(RDF_TYPE), OWL_OBJECT_PROPERTY):
        for label in merged.objects(prop, RDFS_LABEL):
            if isinstance(label, Literal):
                relation_names[label.lexical] = prop

    # top-level categories under each taxonomy root, and their intended shares
    roots = sorted(merged.subjects(TAXONOMY_ROOT, TRUE), key=IRI.sort_key)
    for root in roots:
        classes.add(root)
        ancestors.setdefault(root, set())
        descendants.setdefault(root, set())
    categories: list[IRI] = []
    for root in roots:
        categories.extend(sorted(
            (c for c in classes if root in ancestors.get(c, ())
             and parents.get(c, set()) & {root}),
            key=IRI.sort_key))
    distribution: dict[IRI, float] = {}
    explicit = {t.subject: _float_object(t.object)
                for t in merged.match(None, INTENDED_SHARE, None)}
    if explicit:
        missing = [c for c in categories if c not in explicit]
        if missing:
            names = ", ".join(local_name(c) for c in missing)
            raise SchemaError(f"intended_share missing for: {names}")
        distribution = {c: explicit[c] for c in categories}
    elif categories:
        share = 1.0 / len(categories)
        distribution = {c: share for c in categories}
    if distribution:
        total = sum(distribution.values())
        if abs(total - 1.0) > 1e-9:
            raise SchemaError(f"intended distribution sums to {total!r}, not 1")

    # quality bins: individuals typed by a descendant of the characteristic root
    char_roots = set(merged.subjects(CHARACTERISTIC_ROOT, TRUE))
    char_classes = set()
    for root in char_roots:
        char_classes |= {c for c in descendants.get(root, set())}
    bins: dict[str, list[QualityBin]] = {}
    oor_bins: dict[str, QualityBin] = {}
    for char_cls in char_classes:
        char = local_name(char_cls)
        for individual in merged.subjects(IRI(RDF_TYPE), char_cls):
            if individual in classes:
                continue
            is_oor = TRUE in merged.objects(individual, OUT_OF_RANGE)
            lower = upper = target = None
            unit = ""
            order = 0
            required = True
            for obj in merged.objects(individual, LOWER_BOUND):
                lower = _float_object(obj)
            for obj in merged.objects(individual, UPPER_BOUND):
                upper = _float_object(obj)
            for obj in merged.objects(individual, UNIT):
                unit = obj.lexical if isinstance(obj, Literal) else ""
            for obj in merged.objects(individual, BIN_ORDER):
                order = int(_float_object(obj) or 0)
            for obj in merged.objects(individual, TARGET_SHARE):
                target = _float_object(obj)
            for obj in merged.objects(individual, BIN_REQUIRED):
                required = obj == TRUE
            if not is_oor and lower is None:
                raise SchemaError(
                    f"bin {local_name(individual)} has no lower_bound")
            qbin = QualityBin(individual, char, local_name(individual),
                              lower, upper, unit, required and not is_oor,
                              target, is_oor, order)
            if is_oor:
                oor_bins[char] = qbin
            else:
                bins.setdefault(char, []).append(qbin)

    for char, char_bins in bins.items():
        char_bins.sort(key=lambda b: b.lower)
        for prev, nxt in zip(char_bins, char_bins[1:]):
            if prev.upper is None or nxt.lower < prev.upper:
                raise SchemaError(
                    f"overlapping bins in {char}: {prev.name} and {nxt.name}")
        if char not in oor_bins:
            raise SchemaError(f"characteristic {char} has no out-of-range marker")

    bin_by_name = {}
    for char_bins in bins.values():
        for qbin in char_bins:
            bin_by_name[qbin.name] = qbin
    for qbin in oor_bins.values():
        bin_by_name[qbin.name] = qbin

    class_by_name = {local_name(c): c for c in sorted(classes, key=IRI.sort_key)}

    merged.seal()
    return OntologySchema(
        graph=merged,
        prefixes=dict(merged.prefixes),
        classes=classes,
        parents=parents,
        roots=roots,
        categories=categories,
        intended_distribution=distribution,
        bins=bins,
        oor_bins=oor_bins,
        bin_by_name=bin_by_name,
        class_by_name=class_by_name,
        inverses=inverses,
        relation_names=relation_names,
        _ancestors=ancestors,
        _descendants=descendants,
    )


def bundled_ontology_paths() -> list:
    """Paths of the bundled ontology and prefix files."""
    root = resources.files("ontoguard") / "data"
    return [root / name for name in
            ("prefixes.ttl", "domain.ttl", "quality.ttl", "mls.ttl")]


def load_bundled_schema() -> OntologySchema:
    graphs = []
    for path in bundled_ontology_paths():
        graphs.append(parse_turtle(path.read_text(encoding="utf-8")))
    return load_schema(graphs)
