"""Deterministic synthetic annotation corpora.

Generates long-format annotation CSVs whose distinct-image counts realize a
given per-class and per-bin breakdown, including the three benchmark
dataset shapes (full, missing-domain-entity, missing-quality-entity).
Images may carry more than one vehicle category, which is how a class total
can exceed the image count.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .errors import OntoGuardError

IMAGE_WIDTH = 640
IMAGE_HEIGHT = 480

CATEGORIES = [
    "EMS_Vehicle",
    "Fire_Vehicle",
    "Mobile_Communications_Vehicle",
    "Police_Vehicle",
    "Rescue_Vehicle",
    "Tow_Truck",
]


@dataclass
class CorpusSpec:
    name: str
    total_images: int
    domain_counts: dict[str, int]
    # characteristic -> bin local name -> image count; shortfalls against
    # total_images are filled with the characteristic's out-of-range marker
    quality_counts: dict[str, dict[str, int]] = field(default_factory=dict)


def _quality(defocus, gaussian, haze, motion, contrast, illumination,
             occlusion, resolution) -> dict[str, dict[str, int]]:
    none_low_high = lambda prefix, a, b, c: {
        f"{prefix}_None": a, f"{prefix}_Low": b, f"{prefix}_High": c}
    return {
        "Defocus_Blur": none_low_high("Defocus_Blur", *defocus),
        "Gaussian_Blur": none_low_high("Gaussian_Blur", *gaussian),
        "Haze_Blur": none_low_high("Haze_Blur", *haze),
        "Motion_Blur": none_low_high("Motion_Blur", *motion),
        "Contrast": {"Contrast_Low": contrast[0], "Contrast_High": contrast[1]},
        "Illumination": {
            "Illumination_Night": illumination[0],
            "Illumination_Day_Low": illumination[1],
            "Illumination_Day_High": illumination[2],
        },
        "Occlusion": {
            "Occlusion_None": occlusion[0],
            "Occlusion_Low": occlusion[1],
            "Occlusion_Medium": occlusion[2],
            "Occlusion_High": occlusion[3],
        },
        "Resolution": {
            "Resolution_Low": resolution[0],
            "Resolution_Medium": resolution[1],
            "Resolution_High": resolution[2],
        },
    }


DATASET_ONE = CorpusSpec(
    name="dataset_one",
    total_images=504,
    domain_counts=dict(zip(CATEGORIES, [103, 93, 84, 92, 84, 84])),
    quality_counts=_quality(
        defocus=(435, 63, 6), gaussian=(482, 16, 6), haze=(484, 11, 9),
        motion=(468, 30, 6), contrast=(54, 450), illumination=(54, 121, 329),
        occlusion=(307, 107, 42, 48), resolution=(1, 3, 499)),
)

DATASET_TWO = CorpusSpec(
    name="dataset_two",
    total_images=492,
    domain_counts=dict(zip(CATEGORIES, [123, 111, 98, 106, 98, 0])),
    quality_counts=_quality(
        defocus=(421, 65, 5), gaussian=(464, 24, 4), haze=(471, 11, 10),
        motion=(449, 37, 6), contrast=(53, 439), illumination=(56, 128, 308),
        occlusion=(302, 96, 44, 50), resolution=(0, 3, 489)),
)

DATASET_THREE = CorpusSpec(
    name="dataset_three",
    total_images=504,
    domain_counts=dict(zip(CATEGORIES, [105, 92, 84, 91, 83, 84])),
    quality_counts=_quality(
        defocus=(433, 65, 6), gaussian=(474, 24, 6), haze=(504, 0, 0),
        motion=(465, 33, 6), contrast=(40, 464), illumination=(54, 126, 324),
        occlusion=(308, 107, 39, 50), resolution=(1, 3, 499)),
)

BENCHMARK_CORPORA = {
    "one": DATASET_ONE,
    "two": DATASET_TWO,
    "three": DATASET_THREE,
}


def _assign_domain_labels(spec: CorpusSpec) -> list[list[str]]:
    """Per-image class lists realizing the exact distinct-image counts."""
    total = spec.total_images
    labels: list[str] = []
    for cls, count in spec.domain_counts.items():
        if count > total:
            raise OntoGuardError(
                f"{spec.name}: {cls} count {count} exceeds {total} images")
        labels.extend([cls] * count)
    if len(labels) < total:
        raise OntoGuardError(
            f"{spec.name}: only {len(labels)} labels for {total} images")
    per_image: list[list[str]] = [[labels[i]] for i in range(total)]
    for extra in labels[total:]:
        for classes in per_image:
            if extra not in classes:
                classes.append(extra)
                break
        else:
            raise OntoGuardError(
                f"{spec.name}: cannot place an extra {extra} label")
    return per_image


def _assign_quality_labels(spec: CorpusSpec) -> dict[str, list[str]]:
    """Per-characteristic bin assignment, one bin per image."""
    assignments: dict[str, list[str]] = {}
    for char, bin_counts in spec.quality_counts.items():
        binned = sum(bin_counts.values())
        if binned > spec.total_images:
            raise OntoGuardError(
                f"{spec.name}: {char} bins cover {binned} of "
                f"{spec.total_images} images")
        column: list[str] = []
        for name, count in bin_counts.items():
            column.extend([name] * count)
        column.extend([f"{char}_Out_Of_Range"] * (spec.total_images - binned))
        assignments[char] = column
    return assignments


def generate_csv(spec: CorpusSpec) -> str:
    """Annotation CSV for the corpus; deterministic for a given spec."""
    per_image = _assign_domain_labels(spec)
    quality = _assign_quality_labels(spec)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["image_id", "width", "height", "kind", "value",
                     "x", "y", "w", "h"])
    for index in range(spec.total_images):
        image_id = f"{spec.name}_img{index:04d}"
        for slot, cls in enumerate(per_image[index]):
            x = 10 + 150 * (slot % 4)
            writer.writerow([image_id, IMAGE_WIDTH, IMAGE_HEIGHT,
                             "domain", cls, x, 10, 120, 120])
        for char in sorted(quality):
            writer.writerow([image_id, IMAGE_WIDTH, IMAGE_HEIGHT,
                             "quality", quality[char][index], "", "", "", ""])
    return out.getvalue()
