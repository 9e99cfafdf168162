"""Dataset profiling and validation verdicts.

``profile`` turns a dataset knowledge graph into per-class and per-bin
distinct-image counts via COUNT queries; ``check`` compares the profile
against the schema's intended distribution and required bins; ``verdict``
maps findings to a CI exit status.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import OntoGuardError
from .ontology import (
    HAS_PART, IMAGE_CLASS, OntologySchema, SHOWS, local_name,
)
from .query import evaluate, parse_query
from .store import Graph
from .terms import IRI

EXIT_PASS = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


@dataclass
class DatasetProfile:
    total_images: int
    class_counts: dict[IRI, int]
    # characteristic -> bin local name -> distinct-image count (the
    # out-of-range marker bin is included as a regular key)
    quality_counts: dict[str, dict[str, int]]

    def class_count(self, cls: IRI) -> int:
        return self.class_counts.get(cls, 0)


@dataclass
class ValidationPolicy:
    distribution_tolerance: float = 0.05
    min_count: int = 1
    strict: bool = False
    leaf_level: bool = False
    required_bin_overrides: dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.distribution_tolerance <= 1.0:
            raise OntoGuardError(
                f"tolerance must be in [0, 1]: {self.distribution_tolerance!r}")
        if self.min_count < 0:
            raise OntoGuardError(f"min_count must be >= 0: {self.min_count!r}")

    def as_dict(self) -> dict:
        return {
            "distribution_tolerance": self.distribution_tolerance,
            "min_count": self.min_count,
            "strict": self.strict,
            "leaf_level": self.leaf_level,
            "required_bin_overrides": dict(self.required_bin_overrides),
        }


@dataclass
class ValidationFinding:
    kind: str       # MissingDomainEntity | MissingQualityEntity |
                    # DistributionDeviation | OutOfRangeValue
    subject: IRI
    severity: str   # error | warning
    observed: float
    expected: float | None
    message: str

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "subject": self.subject.value,
            "severity": self.severity,
            "observed": self.observed,
            "expected": self.expected,
            "message": self.message,
        }


def _count_query(graph: Graph, predicate: IRI, obj: IRI) -> int:
    text = (f"SELECT (COUNT(?s) AS ?n) WHERE {{ "
            f"?s <{predicate.value}> <{obj.value}> . }}")
    return evaluate(parse_query(text), graph)


def profile(graph: Graph, schema: OntologySchema,
            count_boxes: bool = False) -> DatasetProfile:
    """Count distinct images per class and per quality bin.

    With ``count_boxes`` the domain counts switch to box-level counting
    (one count per labeled instance rather than per image).
    """
    rdf_type = IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    total = _count_query(graph, rdf_type, IMAGE_CLASS)

    class_counts: dict[IRI, int] = {}
    scope = set()
    for root in schema.roots:
        scope.add(root)
        scope |= schema.descendants(root)
    for cls in sorted(scope, key=IRI.sort_key):
        if count_boxes:
            count = sum(_count_query(graph, SHOWS, c)
                        for c in sorted({cls} | schema.descendants(cls),
                                        key=IRI.sort_key))
        else:
            count = _count_query(graph, HAS_PART, cls)
        class_counts[cls] = count

    quality_counts: dict[str, dict[str, int]] = {}
    for char in schema.characteristics:
        per_bin: dict[str, int] = {}
        for qbin in schema.bins[char] + [schema.oor_bins[char]]:
            per_bin[qbin.name] = _count_query(graph, HAS_PART, qbin.iri)
        quality_counts[char] = per_bin
        binned = sum(per_bin.values())
        if total and binned != total:
            raise OntoGuardError(
                f"{char} bin counts sum to {binned}, expected {total}: "
                "every image must carry exactly one bin per characteristic")

    if not count_boxes:
        # an image is counted once per class, so no class can beat the total
        for cls, count in class_counts.items():
            if count > total:
                raise OntoGuardError(
                    f"{local_name(cls)} count {count} exceeds image total {total}")
    return DatasetProfile(total, class_counts, quality_counts)


def check(prof: DatasetProfile, schema: OntologySchema,
          policy: ValidationPolicy | None = None) -> list[ValidationFinding]:
    """Findings against the policy; an empty list is a pass."""
    policy = policy or ValidationPolicy()
    findings: list[ValidationFinding] = []

    if policy.leaf_level:
        scope = [c for c in sorted(prof.class_counts, key=IRI.sort_key)
                 if c not in schema.roots]
    else:
        scope = list(schema.categories)
    for cls in scope:
        count = prof.class_count(cls)
        name = local_name(cls)
        if count == 0:
            findings.append(ValidationFinding(
                "MissingDomainEntity", cls, "error", 0, None,
                f"no images labeled {name} or any of its subclasses"))
            continue
        target = schema.intended_distribution.get(cls)
        if target is not None and prof.total_images:
            share = count / prof.total_images
            if abs(share - target) > policy.distribution_tolerance:
                findings.append(ValidationFinding(
                    "DistributionDeviation", cls, "error", round(share, 6), target,
                    f"{name} share {share:.4f} deviates from target "
                    f"{target:.4f} by more than {policy.distribution_tolerance}"))

    for char in schema.characteristics:
        per_bin = prof.quality_counts.get(char, {})
        for qbin in schema.bins[char]:
            required = policy.required_bin_overrides.get(qbin.name, qbin.required)
            count = per_bin.get(qbin.name, 0)
            if required and count < policy.min_count:
                findings.append(ValidationFinding(
                    "MissingQualityEntity", qbin.iri, "error", count,
                    policy.min_count,
                    f"{qbin.name}: {count} images, required at least "
                    f"{policy.min_count}"))
            elif qbin.target_share is not None and prof.total_images:
                share = count / prof.total_images
                if abs(share - qbin.target_share) > policy.distribution_tolerance:
                    findings.append(ValidationFinding(
                        "DistributionDeviation", qbin.iri, "error",
                        round(share, 6), qbin.target_share,
                        f"{qbin.name} share {share:.4f} deviates from target "
                        f"{qbin.target_share:.4f}"))
        oor = schema.oor_bins[char]
        oor_count = per_bin.get(oor.name, 0)
        if oor_count > 0:
            findings.append(ValidationFinding(
                "OutOfRangeValue", oor.iri, "warning", oor_count, None,
                f"{oor_count} images carry a {char} value outside every "
                "declared bin"))

    findings.sort(key=lambda f: (f.severity != "error", f.subject.value))
    return findings


def verdict(findings: list[ValidationFinding], strict: bool = False) -> int:
    """0 = pass, 1 = findings. Warnings only fail under strict."""
    if any(f.severity == "error" for f in findings):
        return EXIT_FINDINGS
    if strict and findings:
        return EXIT_FINDINGS
    return EXIT_PASS


def report_dict(prof: DatasetProfile, findings: list[ValidationFinding],
                policy: ValidationPolicy, schema: OntologySchema) -> dict:
    status = verdict(findings, policy.strict)
    return {
        "profile": {
            "total_images": prof.total_images,
            "class_counts": {local_name(c): n
                             for c, n in sorted(prof.class_counts.items(),
                                                key=lambda kv: kv[0].value)
                             if n or c in schema.categories},
            "quality_counts": {char: dict(sorted(bins.items()))
                               for char, bins in sorted(prof.quality_counts.items())},
        },
        "findings": [f.as_dict() for f in findings],
        "policy": policy.as_dict(),
        "verdict": "pass" if status == EXIT_PASS else "findings",
        "exit_code": status,
    }


def report_json(prof, findings, policy, schema) -> str:
    return json.dumps(report_dict(prof, findings, policy, schema),
                      indent=2, sort_keys=True) + "\n"


_COLUMNS = ["None", "Low", "Medium", "High"]


def _column_of(bin_name: str) -> str:
    for column in ("None", "Night", "Day_Low", "Low", "Medium", "Day_High", "High"):
        if bin_name.endswith("_" + column):
            return {"Night": "None", "Day_Low": "Low", "Day_High": "High"}.get(
                column, column)
    return "High"


def report_markdown(prof: DatasetProfile, findings: list[ValidationFinding],
                    policy: ValidationPolicy, schema: OntologySchema) -> str:
    status = verdict(findings, policy.strict)
    lines = ["# Dataset validation report", ""]
    lines.append(f"Verdict: **{'PASS' if status == EXIT_PASS else 'FINDINGS'}** "
                 f"({prof.total_images} images)")
    lines.append("")

    lines.append("## Domain breakdown")
    lines.append("")
    lines.append("| Entity | Number of Images | Share | Target |")
    lines.append("| --- | --- | --- | --- |")
    for cls in schema.categories:
        count = prof.class_count(cls)
        share = count / prof.total_images if prof.total_images else 0.0
        target = schema.intended_distribution.get(cls)
        target_s = f"{target:.4f}" if target is not None else "-"
        lines.append(f"| {local_name(cls)} | {count} | {share:.4f} | {target_s} |")
    lines.append("")

    lines.append("## Quality characteristic breakdown")
    lines.append("")
    lines.append("| Entity | " + " | ".join(_COLUMNS) + " | Out of range |")
    lines.append("| --- |" + " --- |" * (len(_COLUMNS) + 1))
    for char in schema.characteristics:
        per_bin = prof.quality_counts.get(char, {})
        cells = {column: "N/A" for column in _COLUMNS}
        for qbin in schema.bins[char]:
            column = _column_of(qbin.name)
            count = per_bin.get(qbin.name, 0)
            suffix = qbin.name[len(char) + 1:] if qbin.name.startswith(char) else qbin.name
            if suffix != column:
                cells[column] = f"({suffix}) {count}"
            else:
                cells[column] = str(count)
        oor = per_bin.get(schema.oor_bins[char].name, 0)
        row = " | ".join(cells[column] for column in _COLUMNS)
        lines.append(f"| {char.replace('_', ' ')} | {row} | {oor} |")
    lines.append("")

    lines.append("## Findings")
    lines.append("")
    if findings:
        for finding in findings:
            expected = "" if finding.expected is None else f" (expected {finding.expected})"
            lines.append(f"- **{finding.severity}** {finding.kind} "
                         f"`{local_name(finding.subject)}`: {finding.message}{expected}")
    else:
        lines.append("- none")
    lines.append("")

    lines.append("## Policy")
    lines.append("")
    for key, value in sorted(policy.as_dict().items()):
        lines.append(f"- {key}: {value}")
    lines.append("")
    return "\n".join(lines)
