"""Ontology-driven completeness and quality validation for object-detection
training datasets."""

from .errors import (
    AnnotationError, GraphError, OntoGuardError, QuerySyntaxError,
    SchemaError, TurtleSyntaxError,
)
from .ingest import AnnotationRecord, build_kg, parse_annotations
from .metrics import ConfusionCounts, GroupedCounts, fairness, performance
from .ontology import (
    OntologySchema, QualityBin, bundled_ontology_paths, load_bundled_schema,
    load_schema,
)
from .query import Query, evaluate, parse_query
from .rdf_io import (
    parse_ntriples, parse_turtle, serialize_ntriples, serialize_turtle,
)
from .store import Graph
from .terms import IRI, Literal, Triple
from .validate import (
    DatasetProfile, ValidationFinding, ValidationPolicy, check, profile,
    report_json, report_markdown, verdict,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationError", "AnnotationRecord", "ConfusionCounts", "DatasetProfile",
    "Graph", "GraphError", "GroupedCounts", "IRI", "Literal", "OntoGuardError",
    "OntologySchema", "QualityBin", "Query", "QuerySyntaxError", "SchemaError",
    "Triple", "TurtleSyntaxError", "ValidationFinding", "ValidationPolicy",
    "build_kg", "bundled_ontology_paths", "check", "evaluate", "fairness",
    "load_bundled_schema", "load_schema", "parse_annotations", "parse_ntriples",
    "parse_query", "parse_turtle", "performance", "profile", "report_json",
    "report_markdown", "serialize_ntriples", "serialize_turtle", "verdict",
]
