import random
from fractions import Fraction

import pytest

from movcone.utils.cones import dot, negate
from movcone.utils.corpus import corpus_path
from movcone.utils.documents import load_graph
from movcone.utils.errors import CycleDetected, MissingModel, UnknownRay
from movcone.utils.flips import (
    FlipSequence,
    FlipStep,
    enumerate_pmc_sequences,
    numerical_pullback_curve,
    numerical_pushforward_curve,
    pullback_along,
    pullback_divisor,
    pushforward_along,
    pushforward_divisor,
    reverse_flip,
    strict_transform_curve,
    verify_flip,
    verify_graph,
    verify_transport,
)
from movcone.utils.models import FlipSpec


@pytest.fixture
def fourfold_graph():
    return load_graph(corpus_path("fourfold_example"))


@pytest.fixture
def flip_nu(fourfold_graph):
    return fourfold_graph.flip("X", "nu")


@pytest.fixture
def flip_gamma(fourfold_graph):
    return fourfold_graph.flip("X", "gamma")


@pytest.fixture
def skew_flip():
    return FlipSpec(
        source_ray="s",
        target_model="Y",
        pushforward_matrix=((1, 1, 0), (0, 1, 0), (0, 0, 2)),
        flipped_curve=(0, 0, -1),
    )


def test_divisor_transport(flip_nu):
    diagonal = FlipSpec(target_model="Y", pushforward_matrix=((1, 0, 0), (0, 1, 0), (0, 0, 2)), flipped_curve=(0, 0, 1))
    assert pushforward_divisor(flip_nu, (0, 1, 1)) == (0, 1, 1)
    assert pushforward_divisor(flip_nu, (0, 1, 0)) == (0, 1, 0)
    assert pushforward_divisor(diagonal, (1, 1, 1)) == (1, 1, 2)
    assert pullback_divisor(diagonal, (1, 1, 2)) == (1, 1, 1)
    assert pullback_divisor(flip_nu, (0, 1, 1)) == (0, 1, 1)


def test_curve_transport(flip_nu, flip_gamma):
    assert numerical_pullback_curve(flip_gamma, (-1, 0, 0)) == (-1, 0, 0)
    assert numerical_pullback_curve(flip_nu, (0, 1, 0)) == (0, 1, 0)
    assert numerical_pushforward_curve(flip_nu, (0, 0, 1)) == (0, 0, 1)
    assert flip_nu.flipped_curve == negate(numerical_pushforward_curve(flip_nu, (0, 0, 1)))


def test_transports_are_dual(skew_flip):
    rng = random.Random(7)
    for _ in range(3):
        d = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3))
        c = tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(3))
        assert pullback_divisor(skew_flip, pushforward_divisor(skew_flip, d)) == d
        assert pushforward_divisor(skew_flip, pullback_divisor(skew_flip, d)) == d
        assert numerical_pullback_curve(skew_flip, numerical_pushforward_curve(skew_flip, c)) == c
        assert dot(pushforward_divisor(skew_flip, d), c) == dot(d, numerical_pullback_curve(skew_flip, c))


def test_projection_formula_on_curves_missing_the_flipped_locus(flip_nu):
    lam = (0, 1, 0)
    lam_1 = strict_transform_curve(flip_nu, lam)
    for d in [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, -2, 3)]:
        assert dot(d, numerical_pullback_curve(flip_nu, lam_1)) == dot(pushforward_divisor(flip_nu, d), lam_1)


def test_strict_transforms(fourfold_graph, flip_nu, flip_gamma):
    x1 = fourfold_graph.get("X1")
    x2 = fourfold_graph.get("X2")
    assert strict_transform_curve(flip_nu, (1, 0, 0), incidence=1) == x1.ray("gamma1").generator
    assert strict_transform_curve(flip_nu, (0, 1, 0)) == x1.ray("lambda1").generator
    assert strict_transform_curve(flip_gamma, (0, 0, 1), incidence=1) == x2.ray("nu2").generator
    assert strict_transform_curve(flip_gamma, (0, 1, -1)) == x2.ray("eta2").generator
    assert strict_transform_curve(flip_gamma, (0, 1, 0), incidence=1) == (1, 1, 0)
    with pytest.raises(ValueError):
        strict_transform_curve(flip_nu, (1, 0, 0), incidence=-1)


def test_fourfold_flips_verify(fourfold_graph, flip_nu, flip_gamma):
    x = fourfold_graph.root_model
    assert verify_flip(x, flip_nu, fourfold_graph.get("X1")).ok
    assert verify_flip(x, flip_gamma, fourfold_graph.get("X2")).ok


def test_negated_flipped_curve_breaks_check_a(fourfold_graph, flip_nu):
    broken = flip_nu.model_copy(update={"flipped_curve": negate(flip_nu.flipped_curve)})
    report = verify_flip(fourfold_graph.root_model, broken, fourfold_graph.get("X1"))
    assert "check (a): pullback of flipped curve != -s" in report.issues


def test_missing_transported_class_breaks_check_d(fourfold_graph, flip_gamma):
    x2 = fourfold_graph.get("X2").model_copy(deep=True)
    x2.k_nonneg_curves = []
    report = verify_flip(fourfold_graph.root_model, flip_gamma, x2)
    assert report.issues
    assert all(issue.startswith("check (d)") for issue in report.issues)


def test_single_sign_mutations_are_caught(fourfold_graph):
    x = fourfold_graph.root_model
    for label in ("nu", "gamma"):
        flip = fourfold_graph.flip("X", label)
        target = fourfold_graph.get(flip.target_model)
        matrix = [list(row) for row in flip.pushforward_matrix]
        for i, row in enumerate(matrix):
            for j, entry in enumerate(row):
                if entry == 0:
                    continue
                mutated = [list(r) for r in matrix]
                mutated[i][j] = -entry
                broken = flip.model_copy(update={"pushforward_matrix": tuple(tuple(r) for r in mutated)})
                assert not verify_flip(x, broken, target).ok, (label, i, j)
        for k, entry in enumerate(flip.flipped_curve):
            if entry == 0:
                continue
            curve = list(flip.flipped_curve)
            curve[k] = -entry
            broken = flip.model_copy(update={"flipped_curve": tuple(curve)})
            assert not verify_flip(x, broken, target).ok, (label, k)


def test_k_nonneg_curves_transport_with_positive_degree():
    chain = load_graph(corpus_path("chain"))
    y = chain.get("Y")
    report = verify_flip(y, chain.flip("Y", "r"), chain.get("Z"))
    assert report.ok, report.issues
    w = chain.get("W")
    report = verify_flip(w, chain.flip("W", "s"), chain.get("Z"))
    assert report.ok, report.issues


def test_reverse_flips_transport(fourfold_graph):
    x = fourfold_graph.root_model
    for label in ("nu", "gamma"):
        flip = fourfold_graph.flip("X", label)
        target = fourfold_graph.get(flip.target_model)
        back = reverse_flip(x, flip)
        assert back.target_model == "X"
        report = verify_transport(target, back, x, contracted=flip.flipped_curve)
        assert report.ok, report.issues


def test_verify_graph(fourfold_graph):
    reports = verify_graph(fourfold_graph)
    assert len(reports) == 5
    assert all(report.ok for report in reports)


def test_verify_graph_reports_cycle_flips():
    cycle = load_graph(corpus_path("cycle"))
    reports = {report.subject: report for report in verify_graph(cycle)}
    assert reports["model A"].ok
    assert reports["model B"].ok
    assert any(issue.startswith("check (d)") for issue in reports["flip A:s -> B"].issues)


def test_sequences_of_fourfold_example(fourfold_graph):
    (nu,) = enumerate_pmc_sequences(fourfold_graph, "X", "nu")
    assert nu.terminal_model == "X1"
    assert nu.length == 1
    (gamma,) = enumerate_pmc_sequences(fourfold_graph, "X", "gamma")
    assert gamma.terminal_model == "X2"
    assert [s.describe() for s in enumerate_pmc_sequences(fourfold_graph, "X")] == [
        "gamma: X -> X2 (len 1)",
        "nu: X -> X1 (len 1)",
    ]
    assert enumerate_pmc_sequences(fourfold_graph, "X1") == []


def test_sequence_of_length_two():
    chain = load_graph(corpus_path("chain"))
    assert [s.describe() for s in enumerate_pmc_sequences(chain, "X")] == [
        "r: X -> W -> Z (len 2)",
        "s: X -> Y -> Z (len 2)",
    ]
    (sequence,) = enumerate_pmc_sequences(chain, "X", "s")
    assert [(prefix[-1].ray_label, reached) for prefix, reached in sequence.prefixes()] == [("s", "Y"), ("r", "Z")]


def test_cycle_is_detected():
    cycle = load_graph(corpus_path("cycle"))
    with pytest.raises(CycleDetected) as error:
        enumerate_pmc_sequences(cycle, "A")
    assert error.value.chain == ["A", "B", "A"]
    assert str(error.value) == "flip cycle: A -> B -> A"


def test_missing_flip_target(fourfold_graph):
    fourfold_graph.flip("X", "nu").target_model = "X3"
    with pytest.raises(MissingModel):
        enumerate_pmc_sequences(fourfold_graph, "X", "nu")


def test_unknown_start_ray(fourfold_graph):
    with pytest.raises(UnknownRay):
        enumerate_pmc_sequences(fourfold_graph, "X", "eta")


def test_transport_along_routes(fourfold_graph):
    route = [FlipStep(model_id="X", ray_label="gamma")]
    assert pullback_along(fourfold_graph, route, (-1, 1, 1)) == (-1, 1, 1)
    assert pushforward_along(fourfold_graph, route, (1, 0, 0)) == (1, 0, 0)
    assert pullback_along(fourfold_graph, [], (0, 1, 0)) == (0, 1, 0)


def test_describe_sequence():
    sequence = FlipSequence(steps=[FlipStep(model_id="X", ray_label="nu")], terminal_model="X1")
    assert sequence.describe() == "nu: X -> X1 (len 1)"
