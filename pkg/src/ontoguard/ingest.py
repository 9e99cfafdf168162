"""Annotation CSV ingestion and knowledge-graph construction.

CSV schema (UTF-8, comma-separated, quoted fields allowed):

    image_id,width,height,kind,value,x,y,w,h

One row per label. ``kind`` is ``domain`` (value = vehicle class local name,
bbox columns filled) or ``quality`` (value = quality bin local name, bbox
columns empty). Every image needs at least one domain row and exactly one
quality row per characteristic.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field

from .errors import AnnotationError
from .ontology import (
    BOX_CLASS, BOX_H, BOX_W, BOX_X, BOX_Y, DATA_NS, HAS_PART, HEIGHT,
    IMAGE_CLASS, OntologySchema, SHOWS, WIDTH, local_name,
)
from .store import Graph
from .terms import IRI, Literal, RDF_TYPE, Triple

HEADER = ["image_id", "width", "height", "kind", "value", "x", "y", "w", "h"]

_IMAGE_ID = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.-]*")


@dataclass
class LabelRow:
    kind: str                     # "domain" | "quality"
    value: str                    # class or bin local name
    bbox: tuple[int, int, int, int] | None = None


@dataclass
class AnnotationRecord:
    image_id: str
    width: int
    height: int
    rows: list[LabelRow] = field(default_factory=list)

    def domain_rows(self) -> list[LabelRow]:
        return [r for r in self.rows if r.kind == "domain"]

    def quality_rows(self) -> list[LabelRow]:
        return [r for r in self.rows if r.kind == "quality"]


def _int_field(raw: str, what: str, line: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise AnnotationError(f"row {line}: {what} is not an integer: {raw!r}") from None


def parse_annotations(csv_text: str, schema: OntologySchema) -> list[AnnotationRecord]:
    """Parse and validate annotation CSV against the loaded schema."""
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise AnnotationError("empty annotation file") from None
    if header != HEADER:
        raise AnnotationError(
            f"unexpected header {header!r}; expected {','.join(HEADER)}")

    domain_classes = _labelable_classes(schema)
    records: dict[str, AnnotationRecord] = {}
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell for cell in row):
            continue
        if len(row) != len(HEADER):
            raise AnnotationError(f"row {line}: expected {len(HEADER)} fields")
        image_id, width_s, height_s, kind, value, *bbox_raw = row
        if not _IMAGE_ID.fullmatch(image_id):
            raise AnnotationError(f"row {line}: invalid image_id {image_id!r}")
        width = _int_field(width_s, "width", line)
        height = _int_field(height_s, "height", line)
        if width < 1 or height < 1:
            raise AnnotationError(f"row {line}: image dimensions must be >= 1")
        record = records.get(image_id)
        if record is None:
            record = records[image_id] = AnnotationRecord(image_id, width, height)
        elif (record.width, record.height) != (width, height):
            raise AnnotationError(
                f"row {line}: image {image_id} has conflicting dimensions")

        if kind == "domain":
            if value not in domain_classes:
                raise AnnotationError(f"row {line}: unknown domain class {value!r}")
            if any(not cell for cell in bbox_raw):
                raise AnnotationError(f"row {line}: domain label needs a bounding box")
            x, y, w, h = (_int_field(c, name, line)
                          for c, name in zip(bbox_raw, "xywh"))
            if w < 1 or h < 1 or x < 0 or y < 0 or x + w > width or y + h > height:
                raise AnnotationError(
                    f"row {line}: bounding box ({x},{y},{w},{h}) outside "
                    f"{width}x{height} image")
            record.rows.append(LabelRow("domain", value, (x, y, w, h)))
        elif kind == "quality":
            if any(cell for cell in bbox_raw):
                raise AnnotationError(f"row {line}: quality label must not carry a bbox")
            qbin = schema.bin_by_name.get(value)
            if qbin is None:
                raise AnnotationError(f"row {line}: unknown quality bin {value!r}")
            record.rows.append(LabelRow("quality", value))
        else:
            raise AnnotationError(f"row {line}: unknown label kind {kind!r}")

    expected = set(schema.characteristics)
    for record in records.values():
        if not record.domain_rows():
            raise AnnotationError(f"image {record.image_id} has no domain label")
        seen: set[str] = set()
        for row in record.quality_rows():
            char = schema.bin_by_name[row.value].characteristic
            if char in seen:
                raise AnnotationError(
                    f"image {record.image_id} has duplicate {char} labels")
            seen.add(char)
        if seen != expected:
            missing = ", ".join(sorted(expected - seen))
            raise AnnotationError(
                f"image {record.image_id} is missing quality labels: {missing}")

    return list(records.values())


def _labelable_classes(schema: OntologySchema) -> dict[str, IRI]:
    """Local names of classes under a taxonomy root (roots included)."""
    valid: dict[str, IRI] = {}
    for root in schema.roots:
        valid[local_name(root)] = root
        for cls in schema.descendants(root):
            valid[local_name(cls)] = cls
    return valid


def image_iri(image_id: str) -> IRI:
    return IRI(DATA_NS + image_id)


def build_kg(records: list[AnnotationRecord], schema: OntologySchema,
             prefixes: dict[str, str] | None = None) -> Graph:
    """Emit the dataset knowledge graph, one fixed mapping per CSV row.

    Class labels are deduplicated per image (the counting unit is images,
    not boxes); each box instance still gets its own node with coordinates.
    Ancestor class labels are materialized so category-level count queries
    need no path expressions.
    """
    graph = Graph()
    graph.prefixes.update(schema.prefixes)
    if prefixes:
        graph.prefixes.update(prefixes)
    domain_classes = _labelable_classes(schema)
    for record in sorted(records, key=lambda r: r.image_id):
        img = image_iri(record.image_id)
        graph.insert(Triple(img, IRI(RDF_TYPE), IMAGE_CLASS))
        graph.insert(Triple(img, WIDTH, Literal.integer(record.width)))
        graph.insert(Triple(img, HEIGHT, Literal.integer(record.height)))
        labeled: set[IRI] = set()
        for index, row in enumerate(record.domain_rows()):
            cls = domain_classes[row.value]
            if cls not in labeled:
                labeled.add(cls)
                graph.insert(Triple(img, HAS_PART, cls))
                for ancestor in schema.ancestors(cls):
                    graph.insert(Triple(img, HAS_PART, ancestor))
            box = IRI(DATA_NS + f"{record.image_id}_box{index}")
            x, y, w, h = row.bbox
            graph.insert(Triple(box, IRI(RDF_TYPE), BOX_CLASS))
            graph.insert(Triple(box, SHOWS, cls))
            graph.insert(Triple(box, BOX_X, Literal.integer(x)))
            graph.insert(Triple(box, BOX_Y, Literal.integer(y)))
            graph.insert(Triple(box, BOX_W, Literal.integer(w)))
            graph.insert(Triple(box, BOX_H, Literal.integer(h)))
            graph.insert(Triple(img, HAS_PART, box))
        for row in record.quality_rows():
            graph.insert(Triple(img, HAS_PART, schema.bin_by_name[row.value].iri))
    return graph
