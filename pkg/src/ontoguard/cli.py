"""Command-line entry point: ingest, validate, query, augment, metrics.

Exit codes: 0 pass, 1 validation findings, 2 usage or parse failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import imagequality as iq
from .errors import OntoGuardError
from .ingest import build_kg, parse_annotations
from .metrics import ConfusionCounts, GroupedCounts, fairness, performance
from .ontology import OntologySchema, bundled_ontology_paths, load_schema
from .query import evaluate, parse_query
from .rdf_io import PrefixMap, parse_turtle, serialize_turtle
from .store import Graph
from .terms import IRI, Literal
from .validate import (
    EXIT_USAGE, ValidationPolicy, check, profile, report_json,
    report_markdown, verdict,
)

ONTOLOGY_DIR_ENV = "ONTOGUARD_ONTOLOGY_DIR"


def _ontology_paths(args) -> list:
    if args.ontology:
        return [Path(p) for p in args.ontology]
    env_dir = os.environ.get(ONTOLOGY_DIR_ENV)
    if env_dir:
        paths = sorted(Path(env_dir).glob("*.ttl"))
        if not paths:
            raise OntoGuardError(f"no .ttl files in {env_dir}")
        return paths
    return bundled_ontology_paths()


def _load_schema(args) -> OntologySchema:
    graphs = []
    for path in _ontology_paths(args):
        graphs.append(parse_turtle(path.read_text(encoding="utf-8")))
    return load_schema(graphs)


def _write_output(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _build_graph_from_csv(csv_path: str, schema: OntologySchema) -> Graph:
    records = parse_annotations(
        Path(csv_path).read_text(encoding="utf-8"), schema)
    return build_kg(records, schema)


def cmd_ingest(args) -> int:
    schema = _load_schema(args)
    graph = _build_graph_from_csv(args.annotations, schema)
    _write_output(serialize_turtle(graph), args.out)
    return 0


def cmd_validate(args) -> int:
    schema = _load_schema(args)
    source = Path(args.input)
    if source.suffix.lower() == ".csv":
        graph = _build_graph_from_csv(source, schema)
    else:
        graph = parse_turtle(source.read_text(encoding="utf-8"))
    graph.seal()
    prof = profile(graph, schema, count_boxes=args.count_boxes)
    policy = ValidationPolicy(
        distribution_tolerance=args.tolerance,
        min_count=args.min_count,
        strict=args.strict,
    )
    findings = check(prof, schema, policy)
    if args.format == "md":
        _write_output(report_markdown(prof, findings, policy, schema), args.out)
    elif args.format == "tsv":
        lines = ["severity\tkind\tsubject\tobserved\texpected"]
        for f in findings:
            lines.append(f"{f.severity}\t{f.kind}\t{f.subject.value}"
                         f"\t{f.observed}\t{'' if f.expected is None else f.expected}")
        _write_output("\n".join(lines) + "\n", args.out)
    else:
        _write_output(report_json(prof, findings, policy, schema), args.out)
    return verdict(findings, policy.strict)


def _term_cell(term, pmap: PrefixMap) -> str:
    if isinstance(term, IRI):
        compact = pmap.compact(term.value)
        return compact if compact is not None else term.value
    return term.lexical


def cmd_query(args) -> int:
    graph = parse_turtle(Path(args.kg).read_text(encoding="utf-8"))
    graph.seal()
    query = parse_query(Path(args.query).read_text(encoding="utf-8"),
                        graph.prefixes)
    result = evaluate(query, graph)
    if query.aggregate is not None:
        _alias = query.aggregate[1]
        _write_output(f"?{_alias}\n{result}\n", args.out)
        return 0
    pmap = PrefixMap(graph.prefixes)
    header = "\t".join(f"?{name}" for name in query.projection)
    rows = sorted(
        ("\t".join(_term_cell(row[name], pmap) for name in query.projection)
         for row in result))
    _write_output("\n".join([header] + rows) + "\n", args.out)
    return 0


_BLUR_OPS = {"defocus_blur": "Defocus_Blur", "gaussian_blur": "Gaussian_Blur",
             "motion_blur": "Motion_Blur"}


def _apply_ops(img: iq.RasterImage, ops: list[dict], default_lux: float):
    record: dict = {"Illumination": {"lux": default_lux}}
    for op in ops:
        name = op.get("op")
        if name == "defocus_blur":
            img = iq.defocus_blur(img, op["k"])
            record["Defocus_Blur"] = {"kernel": op["k"]}
        elif name == "gaussian_blur":
            img = iq.gaussian_blur(img, op["k"], op.get("sigma", 0.3 * op["k"]))
            record["Gaussian_Blur"] = {"kernel": op["k"]}
        elif name == "motion_blur":
            img = iq.motion_blur(img, op["k"], op.get("angle", 0.0))
            record["Motion_Blur"] = {"kernel": op["k"]}
        elif name == "haze":
            img = iq.haze(img, op["strength"])
            record["Haze_Blur"] = {"strength": op["strength"]}
        elif name == "contrast":
            img = iq.adjust_contrast(img, op["gain"], op.get("bias", 0.0))
        elif name == "darken":
            img = iq.darken(img, op["factor"])
            if "lux" in op:
                record["Illumination"] = {"lux": op["lux"]}
        elif name == "occlude":
            img, achieved = iq.occlude(img, tuple(op["bbox"]), op["fraction"])
            record["Occlusion"] = {"fraction": achieved}
        else:
            raise OntoGuardError(f"unknown augmentation op {name!r}")
    return img, record


def cmd_augment(args) -> int:
    schema = _load_schema(args)
    plan = json.loads(Path(args.plan).read_text(encoding="utf-8"))
    out_dir = Path(args.out or args.images)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {}
    csv_lines = ["image_id,width,height,kind,value,x,y,w,h"]
    default_lux = float(plan.get("default_lux", 15000))
    for entry in plan.get("images", []):
        src = Path(args.images) / entry["file"]
        img = iq.read_image(src)
        img, record = _apply_ops(img, entry.get("ops", []),
                                 float(entry.get("lux", default_lux)))
        out_name = entry.get("output", entry["file"])
        iq.write_image(out_dir / out_name, img)
        measurements = iq.classify_applied(record, schema)
        measurements["Contrast"] = iq.measure_contrast(img, schema)
        measurements["Resolution"] = iq.measure_resolution(img, schema)
        bins = {char: m.bin.name for char, m in sorted(measurements.items())}
        image_id = Path(out_name).stem
        manifest[image_id] = {
            "file": out_name,
            "params": record,
            "values": {char: m.value for char, m in sorted(measurements.items())},
            "bins": bins,
        }
        for char in sorted(bins):
            csv_lines.append(
                f"{image_id},{img.width},{img.height},quality,{bins[char]},,,,")
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / "quality_rows.csv").write_text(
        "\n".join(csv_lines) + "\n", encoding="utf-8")
    return 0


def cmd_metrics(args) -> int:
    payload = json.loads(Path(args.counts).read_text(encoding="utf-8"))
    result: dict = {}
    if "counts" in payload:
        result["performance"] = performance(ConfusionCounts(**payload["counts"]))
    if "groups" in payload:
        groups = GroupedCounts(
            privileged=ConfusionCounts(**payload["groups"]["privileged"]),
            unprivileged=ConfusionCounts(**payload["groups"]["unprivileged"]),
        )
        result["fairness"] = fairness(groups)
    if not result:
        raise OntoGuardError("counts file needs a 'counts' or 'groups' block")
    _write_output(json.dumps(result, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ontoguard",
        description="Ontology-driven training dataset validation")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--ontology", action="append", default=[],
                       help="ontology .ttl path (repeatable; default: bundled "
                            f"files or ${ONTOLOGY_DIR_ENV})")
        p.add_argument("--out", help="output path (default: stdout)")

    p_ingest = sub.add_parser("ingest", help="annotation CSV -> knowledge graph")
    p_ingest.add_argument("--annotations", required=True, help="annotation CSV")
    add_common(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_validate = sub.add_parser("validate", help="profile and check a dataset")
    p_validate.add_argument("input", help="annotation CSV or knowledge graph .ttl")
    p_validate.add_argument("--tolerance", type=float, default=0.05,
                            help="absolute share deviation tolerance")
    p_validate.add_argument("--min-count", type=int, default=1,
                            help="minimum images per required quality bin")
    p_validate.add_argument("--strict", action="store_true",
                            help="warnings also fail the verdict")
    p_validate.add_argument("--count-boxes", action="store_true",
                            help="count labeled boxes instead of distinct images")
    p_validate.add_argument("--format", choices=["json", "md", "tsv"],
                            default="json")
    add_common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_query = sub.add_parser("query", help="evaluate a query file against a KG")
    p_query.add_argument("kg", help="knowledge graph .ttl")
    p_query.add_argument("query", help="query file (.rq)")
    add_common(p_query)
    p_query.set_defaults(func=cmd_query)

    p_augment = sub.add_parser("augment",
                               help="apply planned transforms to images")
    p_augment.add_argument("images", help="input image directory")
    p_augment.add_argument("plan", help="augmentation plan (JSON)")
    add_common(p_augment)
    p_augment.set_defaults(func=cmd_augment)

    p_metrics = sub.add_parser("metrics",
                               help="performance/fairness metrics from counts")
    p_metrics.add_argument("counts", help="JSON file with confusion counts")
    add_common(p_metrics)
    p_metrics.set_defaults(func=cmd_metrics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except OntoGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    if argv is None:
        sys.exit(code)
    return code
