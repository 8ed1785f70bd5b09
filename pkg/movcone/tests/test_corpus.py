import pytest

from movcone.utils.cones import cone_from_generators, dot, dual_cone, is_subcone, negate
from movcone.utils.corpus import (
    CORPUS_DIRECTORY,
    corpus_path,
    derive_fourfold_example,
    derive_projective_space,
    derive_threefold_example,
    expected_outputs,
    load_corpus_entry,
)
from movcone.utils.documents import load_graph, save_graph
from movcone.utils.equations import moving_cone
from movcone.utils.flips import verify_graph
from movcone.utils.models import nef_cone, validate_model

GOLDEN = ["fourfold_example", "threefold_example", "projective_space_3", "projective_space_4", "chain"]
DERIVED = {
    "fourfold_example": derive_fourfold_example,
    "threefold_example": derive_threefold_example,
    "projective_space_3": lambda: derive_projective_space(3),
    "projective_space_4": lambda: derive_projective_space(4),
}


@pytest.mark.parametrize("name", GOLDEN)
def test_golden_outputs(name):
    entry = load_corpus_entry(name)
    assert expected_outputs(entry.document) == entry.expected


@pytest.mark.parametrize("name", sorted(DERIVED))
def test_corpus_files_match_their_derivation(name):
    assert save_graph(DERIVED[name]()) == save_graph(load_graph(corpus_path(name)))


def test_every_file_has_a_golden_or_is_the_cycle():
    names = {path.name.split(".")[0] for path in CORPUS_DIRECTORY.glob("*.json")}
    assert names == set(GOLDEN) | {"cycle"}


@pytest.mark.parametrize("name", GOLDEN)
def test_corpus_graphs_validate(name):
    reports = verify_graph(load_graph(corpus_path(name)))
    assert all(report.ok for report in reports), [report.issues for report in reports]


def test_cycle_fails_validation():
    assert not all(report.ok for report in verify_graph(load_graph(corpus_path("cycle"))))


@pytest.mark.parametrize("name", GOLDEN)
def test_declared_data_is_consistent(name):
    graph = load_graph(corpus_path(name))
    for model in graph.models:
        nef = nef_cone(model)
        assert nef == dual_cone(model.mori_cone())
        if model.declared_nef_generators is not None:
            assert cone_from_generators(model.declared_nef_generators, model.rho) == nef
        if model.fano:
            assert all(dot(model.canonical_class, g) < 0 for g in model.mori_generators)
    root = graph.root_model
    if root.declared_eff_generators is not None:
        assert is_subcone(moving_cone(graph), cone_from_generators(root.declared_eff_generators, root.rho))


def test_corrupted_threefold_is_rejected():
    model = load_graph(corpus_path("threefold_example")).root_model.model_copy(deep=True)
    model.canonical_class = negate(model.canonical_class)
    report = validate_model(model)
    assert not report.ok
    assert "K_X not negative on ray e" in report.issues
