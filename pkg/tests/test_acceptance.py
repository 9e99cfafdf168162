"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria execute.
"""

import random
import time

import numpy as np
import pytest

from ontoguard import (
    Graph, IRI, Literal, ValidationPolicy, build_kg, check, evaluate,
    load_bundled_schema, load_schema, parse_annotations, parse_query,
    parse_turtle, profile, report_json, report_markdown, serialize_turtle,
    verdict, ConfusionCounts, GroupedCounts, fairness, performance,
)
from ontoguard.corpus import BENCHMARK_CORPORA, generate_csv
from ontoguard.imagequality import (
    RasterImage, box_kernel, defocus_blur, gaussian_blur, gaussian_kernel_1d,
    haze, line_kernel, motion_blur, occlude,
)
from ontoguard.ontology import (
    DOMAIN_NS, HAS_PART, RDFS_SUBCLASS, TAXONOMY_ROOT, local_name,
)
from ontoguard.validate import EXIT_FINDINGS, EXIT_PASS

from _oracles import (
    brute_force_evaluate, naive_convolve2d, random_graph, random_query,
    reachability_matrix, same_solutions,
)
from test_metrics import reference_fairness


def report_criterion(number, label, ok):
    print(f"criterion {number} ({label}): {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {number} failed: {label}"


def build_graphs(schema):
    graphs = {}
    for key, spec in BENCHMARK_CORPORA.items():
        csv_text = generate_csv(spec)
        graphs[key] = build_kg(parse_annotations(csv_text, schema), schema).seal()
    return graphs


def test_criterion_1_table_reproduction(schema):
    started = time.perf_counter()
    ok = True
    graphs = build_graphs(schema)
    for key, spec in BENCHMARK_CORPORA.items():
        prof = profile(graphs[key], schema)
        ok &= prof.total_images == spec.total_images
        for name, count in spec.domain_counts.items():
            ok &= prof.class_counts[schema.class_by_name[name]] == count
        for char, bins in spec.quality_counts.items():
            for bin_name, count in bins.items():
                ok &= prof.quality_counts[char][bin_name] == count
            leftover = spec.total_images - sum(bins.values())
            ok &= prof.quality_counts[char][f"{char}_Out_Of_Range"] == leftover
    elapsed = time.perf_counter() - started
    ok &= elapsed < 5.0
    report_criterion(1, f"table reproduction, {elapsed:.2f}s", ok)


def test_criterion_2_flagging_behavior(schema):
    started = time.perf_counter()
    graphs = build_graphs(schema)
    profiles = {key: profile(g, schema) for key, g in graphs.items()}

    def names(findings, kind):
        return sorted(local_name(f.subject) for f in findings if f.kind == kind)

    default = ValidationPolicy()
    one = check(profiles["one"], schema, default)
    two = check(profiles["two"], schema, default)
    three = check(profiles["three"], schema, default)
    tightened = check(profiles["one"], schema,
                      ValidationPolicy(distribution_tolerance=0.03))

    ok = names(one, "MissingDomainEntity") == []
    ok &= names(one, "DistributionDeviation") == []
    ok &= verdict(one, strict=False) == EXIT_PASS
    ok &= names(two, "MissingDomainEntity") == ["Tow_Truck"]
    ok &= verdict(two) == EXIT_FINDINGS
    ok &= names(three, "MissingQualityEntity") == ["Haze_Blur_High", "Haze_Blur_Low"]
    ok &= verdict(three) == EXIT_FINDINGS
    ok &= names(tightened, "DistributionDeviation") == ["EMS_Vehicle"]
    deviation = [f for f in tightened if f.kind == "DistributionDeviation"][0]
    ok &= abs(deviation.observed - 103 / 504) < 1e-6
    elapsed = time.perf_counter() - started
    ok &= elapsed < 5.0
    report_criterion(2, f"flagging behavior, {elapsed:.2f}s", ok)


def test_criterion_3_query_oracle_equivalence():
    started = time.perf_counter()
    rng = random.Random(20240821)
    cases = 1000
    ok = True
    for _ in range(cases):
        graph = random_graph(rng, max_triples=200)
        query = random_query(rng, graph)
        ok &= same_solutions(evaluate(query, graph),
                             brute_force_evaluate(query, graph))
    elapsed = time.perf_counter() - started
    ok &= elapsed < 30.0
    report_criterion(3, f"{cases} query oracle cases, {elapsed:.2f}s", ok)


def test_criterion_4_taxonomy_transitivity(schema):
    ok = True
    # four-level chain under the existing root, one leaf-labeled image
    chain = Graph()
    names = ["Safety_Rescue_Vehicle", "Chain_Category", "Chain_Kind",
             "Chain_Leaf"]
    chain.add(IRI(DOMAIN_NS + names[0]), TAXONOMY_ROOT, Literal.boolean(True))
    for child, parent in zip(names[1:], names):
        chain.add(IRI(DOMAIN_NS + child), RDFS_SUBCLASS, IRI(DOMAIN_NS + parent))
    chain_schema = load_schema([chain])
    csv_text = (
        "image_id,width,height,kind,value,x,y,w,h\n"
        "img1,64,64,domain,Chain_Leaf,1,1,10,10\n")
    graph = build_kg(parse_annotations(csv_text, chain_schema),
                     chain_schema).seal()
    count = evaluate(parse_query(
        f"SELECT (COUNT(?i) AS ?n) WHERE {{ ?i <{HAS_PART.value}> "
        f"<{DOMAIN_NS}Chain_Category> . }}"), graph)
    ok &= count == 1

    # closure vs matrix reachability on random 30-node DAGs
    rng = random.Random(20240822)
    n = 30
    for _ in range(15):
        edges = {(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.1}
        if not edges:
            continue
        dag = Graph()
        for child, parent in edges:
            dag.add(IRI(DOMAIN_NS + f"C{child}"), RDFS_SUBCLASS,
                    IRI(DOMAIN_NS + f"C{parent}"))
        dag_schema = load_schema([dag])
        reach = reachability_matrix(n, edges)
        for i in range(n):
            node = IRI(DOMAIN_NS + f"C{i}")
            if node not in dag_schema.classes:
                continue
            expected = {IRI(DOMAIN_NS + f"C{j}") for j in range(n) if reach[i, j]}
            ok &= dag_schema.ancestors(node) == expected
    report_criterion(4, "taxonomy transitivity", ok)


def test_criterion_5_turtle_round_trip():
    rng = random.Random(20240823)
    ok = True
    for _ in range(100):
        graph = random_graph(rng, max_triples=60)
        # prefixes are serialization metadata, not sealed triple state
        graph.prefixes["fz"] = "http://example.org/fuzz#"
        text = serialize_turtle(graph)
        back = parse_turtle(text)
        ok &= set(back) == set(graph)
        ok &= serialize_turtle(back) == text
        ok &= serialize_turtle(graph) == text  # byte-stable on a second run
    report_criterion(5, "turtle round trip", ok)


def test_criterion_6_augmentation_numerics():
    ok = True
    for k in (1, 3, 5, 7, 15, 31):
        ok &= abs(float(box_kernel(k).sum()) - 1.0) <= 1e-6
        ok &= abs(float(gaussian_kernel_1d(k, 1.3).sum()) - 1.0) <= 1e-6
        for angle in (0.0, 37.0, 90.0, 145.0):
            ok &= abs(float(line_kernel(k, angle).sum()) - 1.0) <= 1e-6

    rng = random.Random(20240824)
    pixels = np.array([[[rng.randrange(256) for _ in range(3)]
                        for _ in range(16)] for _ in range(16)], dtype=np.uint8)
    img = RasterImage(pixels)
    ok &= (defocus_blur(img, 1).pixels == img.pixels).all()
    ok &= (gaussian_blur(img, 1, 0.7).pixels == img.pixels).all()
    ok &= (motion_blur(img, 1, 10.0).pixels == img.pixels).all()
    constant = RasterImage.filled(9, 9, (42, 111, 222))
    ok &= (defocus_blur(constant, 7).pixels == constant.pixels).all()
    ok &= (gaussian_blur(constant, 7, 1.5).pixels == constant.pixels).all()
    ok &= (motion_blur(constant, 7, 60.0).pixels == constant.pixels).all()

    for _ in range(5):
        sample = RasterImage(np.array(
            [[[rng.randrange(256) for _ in range(3)] for _ in range(16)]
             for _ in range(16)], dtype=np.uint8))
        k, sigma = 5, 1.1
        fast = gaussian_blur(sample, k, sigma).pixels.astype(np.int16)
        col = gaussian_kernel_1d(k, sigma)
        slow = naive_convolve2d(sample.pixels, np.outer(col, col))
        slow = np.clip(np.sign(slow) * np.floor(np.abs(slow) + 0.5),
                       0, 255).astype(np.int16)
        ok &= int(np.abs(fast - slow).max()) <= 1

    for _ in range(20):
        w, h = rng.randint(2, 25), rng.randint(2, 25)
        fraction = rng.uniform(0.0, 0.8)
        base = RasterImage.filled(30, 30, (255, 255, 255))
        _, achieved = occlude(base, (2, 2, w, h), fraction)
        ok &= abs(achieved - fraction) <= 1 / (w * h)

    black = RasterImage.filled(12, 12, (0, 0, 0))
    hazed = haze(black, 30.0)
    ok &= int(np.abs(hazed.pixels.astype(np.int16) - 128).max()) <= 1
    report_criterion(6, "augmentation numerics", ok)


def test_criterion_7_quality_binning(schema):
    cases = [
        ("Defocus_Blur", 0, "Defocus_Blur_None"),
        ("Defocus_Blur", 1, "Defocus_Blur_Low"),
        ("Defocus_Blur", 15, "Defocus_Blur_High"),
        ("Defocus_Blur", 30, "Defocus_Blur_Out_Of_Range"),
        ("Gaussian_Blur", 0, "Gaussian_Blur_None"),
        ("Gaussian_Blur", 1, "Gaussian_Blur_Low"),
        ("Gaussian_Blur", 15, "Gaussian_Blur_High"),
        ("Gaussian_Blur", 30, "Gaussian_Blur_Out_Of_Range"),
        ("Haze_Blur", 0, "Haze_Blur_None"),
        ("Haze_Blur", 1, "Haze_Blur_Low"),
        ("Haze_Blur", 15, "Haze_Blur_High"),
        ("Haze_Blur", 30, "Haze_Blur_Out_Of_Range"),
        ("Motion_Blur", 0, "Motion_Blur_None"),
        ("Motion_Blur", 1, "Motion_Blur_Low"),
        ("Motion_Blur", 15, "Motion_Blur_High"),
        ("Motion_Blur", 30, "Motion_Blur_Out_Of_Range"),
        ("Occlusion", 0.4, "Occlusion_Medium"),
        ("Occlusion", 0.6, "Occlusion_High"),
        ("Occlusion", 0.8, "Occlusion_Out_Of_Range"),
        ("Occlusion", 0.95, "Occlusion_Out_Of_Range"),
        ("Contrast", 0.5, "Contrast_High"),
        ("Illumination", 1000, "Illumination_Day_Low"),
        ("Illumination", 11000, "Illumination_Day_High"),
        ("Resolution", 32, "Resolution_Low"),
        ("Resolution", 64, "Resolution_Medium"),
        ("Resolution", 256, "Resolution_High"),
        ("Resolution", 512, "Resolution_High"),
    ]
    ok = all(schema.bin_for(char, value).name == expected
             for char, value, expected in cases)

    # an out-of-range occlusion value must surface as a warning finding
    quality = ["Contrast_High", "Defocus_Blur_None", "Gaussian_Blur_None",
               "Haze_Blur_None", "Illumination_Day_High", "Motion_Blur_None",
               "Occlusion_Out_Of_Range", "Resolution_High"]
    lines = ["image_id,width,height,kind,value,x,y,w,h",
             "img1,640,480,domain,Police_Car,1,1,50,50"]
    lines += [f"img1,640,480,quality,{name},,,," for name in quality]
    graph = build_kg(parse_annotations("\n".join(lines) + "\n", schema),
                     schema).seal()
    findings = check(profile(graph, schema), schema)
    warnings = [f for f in findings
                if f.kind == "OutOfRangeValue" and f.severity == "warning"
                and local_name(f.subject) == "Occlusion_Out_Of_Range"]
    ok &= len(warnings) == 1
    report_criterion(7, "quality binning boundaries", ok)


def test_criterion_8_metrics():
    perfect = performance(ConfusionCounts(tp=10, fp=0, tn=10, fn=0))
    ok = perfect == {"recall": 1.0, "false_alarm": 0.0, "accuracy": 1.0,
                     "precision": 1.0, "f1": 1.0}
    same = ConfusionCounts(tp=6, fp=2, tn=9, fn=3)
    ok &= fairness(GroupedCounts(privileged=same, unprivileged=same)) == \
        {"aod": 0.0, "eod": 0.0, "spd": 0.0, "di": 1.0}

    rng = random.Random(20240825)
    for _ in range(500):
        priv = ConfusionCounts(*(rng.randint(0, 40) for _ in range(4)))
        unpriv = ConfusionCounts(*(rng.randint(0, 40) for _ in range(4)))
        grouped = GroupedCounts(privileged=priv, unprivileged=unpriv)
        base = fairness(grouped)
        ok &= base == reference_fairness(priv, unpriv)

        factor = rng.randint(2, 6)
        scaled = GroupedCounts(
            privileged=ConfusionCounts(priv.tp * factor, priv.fp * factor,
                                       priv.tn * factor, priv.fn * factor),
            unprivileged=ConfusionCounts(unpriv.tp * factor, unpriv.fp * factor,
                                         unpriv.tn * factor, unpriv.fn * factor))
        grown = fairness(scaled)
        for key, value in base.items():
            if value is None:
                ok &= grown[key] is None
            else:
                ok &= abs(grown[key] - value) < 1e-9

        swapped = fairness(GroupedCounts(privileged=unpriv, unprivileged=priv))
        for key in ("aod", "eod", "spd"):
            if base[key] is not None:
                ok &= abs(swapped[key] + base[key]) < 1e-9
        if base["di"] not in (None, 0):
            ok &= abs(swapped["di"] - 1 / base["di"]) < 1e-9
    report_criterion(8, "metrics ideal values and properties", ok)


def test_criterion_9_end_to_end_determinism():
    artifacts = []
    for _ in range(2):
        schema = load_bundled_schema()
        csv_text = generate_csv(BENCHMARK_CORPORA["one"])
        graph = build_kg(parse_annotations(csv_text, schema), schema).seal()
        prof = profile(graph, schema)
        policy = ValidationPolicy()
        findings = check(prof, schema, policy)
        artifacts.append((
            serialize_turtle(graph).encode(),
            report_json(prof, findings, policy, schema).encode(),
            report_markdown(prof, findings, policy, schema).encode(),
        ))
    ok = artifacts[0] == artifacts[1]
    report_criterion(9, "end-to-end determinism", ok)
