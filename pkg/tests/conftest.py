import pytest

from ontoguard import build_kg, load_bundled_schema, parse_annotations, profile
from ontoguard.corpus import BENCHMARK_CORPORA, generate_csv


@pytest.fixture(scope="session")
def schema():
    return load_bundled_schema()


@pytest.fixture(scope="session")
def corpus_csvs():
    return {key: generate_csv(spec) for key, spec in BENCHMARK_CORPORA.items()}


@pytest.fixture(scope="session")
def corpus_graphs(schema, corpus_csvs):
    graphs = {}
    for key, csv_text in corpus_csvs.items():
        graph = build_kg(parse_annotations(csv_text, schema), schema)
        graphs[key] = graph.seal()
    return graphs


@pytest.fixture(scope="session")
def corpus_profiles(schema, corpus_graphs):
    return {key: profile(graph, schema)
            for key, graph in corpus_graphs.items()}
