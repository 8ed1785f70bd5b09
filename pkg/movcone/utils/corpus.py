import json
import logging
from pathlib import Path

import sympy as sp
from pydantic import BaseModel

from .cones import LinearMap, from_sympy, negate
from .documents import load_graph
from .equations import eq_for_variety, moving_cone
from .flips import enumerate_pmc_sequences, pushforward_divisor, strict_transform_curve
from .models import (
    ClassSpace,
    ExtremalRayData,
    FlipSpec,
    ModelGraph,
    RayKind,
    VarietyModel,
    Vector,
    nef_cone,
)

logger = logging.getLogger(__name__)

CORPUS_DIRECTORY = Path(__file__).resolve().parent.parent / "corpus"


class CorpusExpectation(BaseModel):
    eq: list[Vector]
    mov: list[Vector]
    sequences: list[str]


class CorpusEntry(BaseModel):
    name: str
    document: ModelGraph
    expected: CorpusExpectation


def corpus_path(name: str) -> Path:
    return CORPUS_DIRECTORY / f"{name}.json"


def load_corpus_entry(name: str) -> CorpusEntry:
    expected = json.loads((CORPUS_DIRECTORY / f"{name}.expected.json").read_text(encoding="utf-8"))
    return CorpusEntry(name=name, document=load_graph(corpus_path(name)), expected=expected)


def expected_outputs(graph: ModelGraph) -> CorpusExpectation:
    return CorpusExpectation(
        eq=eq_for_variety(graph).vectors(),
        mov=list(moving_cone(graph).rays),
        sequences=[s.describe() for s in enumerate_pmc_sequences(graph, graph.root)],
    )


def _column(matrix: sp.Matrix) -> tuple:
    return tuple(from_sympy(x) for x in matrix)


def _blow_up_curve(base_degrees: tuple[int, int], exceptional_degree: int) -> tuple:
    """Coordinates (c.Gamma, c.Lambda, c.E) of a curve on the blow-up X of Y.

    ``base_degrees`` are the degrees of the image curve against
    (Gamma', Lambda') on Y, ``exceptional_degree`` is c.E. The basis of
    N^1(X) in terms of (mu^*Gamma', mu^*Lambda', E) is Gamma = mu^*Gamma',
    Lambda = mu^*Lambda' - E and E.
    """
    basis = sp.Matrix([[1, 0, 0], [0, 1, -1], [0, 0, 1]])
    pairing = sp.Matrix([*base_degrees, exceptional_degree])
    return _column(basis * pairing)


def _solve_canonical(curves: list[tuple], degrees: list[int]) -> tuple:
    unknowns = sp.symbols(f"k0:{len(curves[0])}")
    equations = [sum(u * c for u, c in zip(unknowns, curve)) - d for curve, d in zip(curves, degrees)]
    (solution,) = sp.linsolve(equations, unknowns)
    return _column(sp.Matrix(solution))


def _model(model_id, dimension, labels, canonical, mori, rays, fano, k_nonneg=()) -> VarietyModel:
    model = VarietyModel(
        id=model_id,
        dimension=dimension,
        space=ClassSpace(picard_rank=len(labels), divisor_basis_labels=labels),
        canonical_class=canonical,
        mori_generators=mori,
        extremal_rays=rays,
        fano=fano,
        k_nonneg_curves=list(k_nonneg),
    )
    model.declared_nef_generators = list(nef_cone(model).generators)
    return model


def _flip(label: str, target: str, pushforward: LinearMap, contracted: tuple) -> FlipSpec:
    flipped = negate(pushforward.inverse().transpose().apply(contracted))
    return FlipSpec(
        source_ray=label,
        target_model=target,
        pushforward_matrix=pushforward.matrix,
        flipped_curve=flipped,
    )


def derive_fourfold_example() -> ModelGraph:
    """Blow-up of P(O + O(1)^2) over P^2 along a line in a fibre, and its two flips.

    Intersection numbers on Y: Gamma'.gamma' = 1, Gamma'.lambda' = 0,
    Lambda'.gamma' = 0, Lambda'.lambda' = 1; on the blow-up E.eta = -1 and
    strict transforms of curves disjoint from the line miss E.
    """
    gamma = _blow_up_curve((1, 0), 0)
    lam = _blow_up_curve((0, 1), 0)
    eta = _blow_up_curve((0, 0), -1)
    nu = _blow_up_curve((0, 1), 1)
    exceptional = (0, 0, 1)
    canonical = _solve_canonical([gamma, nu, eta], [-1, -1, -1])
    identity = LinearMap.identity(3)
    labels = ["Gamma", "Lambda", "E"]

    flip_nu = _flip("nu", "X1", identity, nu)
    nu_1 = flip_nu.flipped_curve
    flip_gamma = _flip("gamma", "X2", identity, gamma)
    gamma_2 = flip_gamma.flipped_curve

    x = _model(
        "X",
        4,
        labels,
        canonical,
        [gamma, nu, eta],
        [
            ExtremalRayData(label="nu", generator=nu, kind=RayKind.small, flip=flip_nu),
            ExtremalRayData(label="gamma", generator=gamma, kind=RayKind.small, flip=flip_gamma),
            ExtremalRayData(
                label="eta", generator=eta, kind=RayKind.divisorial, exceptional_divisor=exceptional
            ),
        ],
        fano=True,
    )

    gamma_1 = strict_transform_curve(flip_nu, gamma, incidence=1)
    lambda_1 = strict_transform_curve(flip_nu, lam)
    x1 = _model(
        "X1",
        4,
        labels,
        pushforward_divisor(flip_nu, canonical),
        [gamma_1, nu_1, lambda_1],
        [
            ExtremalRayData(label="gamma1", generator=gamma_1, kind=RayKind.fibre),
            ExtremalRayData(label="lambda1", generator=lambda_1, kind=RayKind.fibre),
        ],
        fano=False,
        k_nonneg=[nu_1],
    )

    nu_2 = strict_transform_curve(flip_gamma, nu, incidence=1)
    eta_2 = strict_transform_curve(flip_gamma, eta)
    x2 = _model(
        "X2",
        4,
        labels,
        pushforward_divisor(flip_gamma, canonical),
        [gamma_2, nu_2, eta_2],
        [
            ExtremalRayData(label="nu2", generator=nu_2, kind=RayKind.fibre),
            ExtremalRayData(
                label="eta2",
                generator=eta_2,
                kind=RayKind.divisorial,
                exceptional_divisor=pushforward_divisor(flip_gamma, exceptional),
            ),
        ],
        fano=False,
        k_nonneg=[gamma_2],
    )

    graph = ModelGraph(
        root="X",
        models=[x, x1, x2],
        notes=[
            "Divisor basis (Gamma, Lambda, E); curves as (c.Gamma, c.Lambda, c.E).",
            "K_X solves K.gamma = K.nu = K.eta = -1; K.eta = -1 is a chosen normalization.",
            "Both flips act as the identity on the transported divisor bases.",
        ],
    )
    graph.root_model.declared_eff_generators = eq_for_variety(graph).vectors()
    logger.debug("derived the fourfold example with K_X = %s", canonical)
    return graph


def derive_threefold_example() -> ModelGraph:
    """Blow-up of P^3 at a point, basis (H, E), K = mu^*K_P3 + 2E."""
    e = (0, -1)
    line_through_point = (1, 1)
    canonical = _column(sp.Matrix([-4, 0]) + 2 * sp.Matrix([0, 1]))
    model = _model(
        "BlP3",
        3,
        ["H", "E"],
        canonical,
        [e, line_through_point],
        [
            ExtremalRayData(label="e", generator=e, kind=RayKind.divisorial, exceptional_divisor=(0, 1)),
            ExtremalRayData(label="l", generator=line_through_point, kind=RayKind.fibre),
        ],
        fano=True,
    )
    return ModelGraph(
        root="BlP3",
        models=[model],
        notes=["Blow-up of P^3 at a point; divisor basis (H, E)."],
    )


def derive_projective_space(dimension: int) -> ModelGraph:
    model = _model(
        f"P{dimension}",
        dimension,
        ["H"],
        (-(dimension + 1),),
        [(1,)],
        [ExtremalRayData(label="line", generator=(1,), kind=RayKind.fibre)],
        fano=True,
    )
    model.declared_eff_generators = [(1,)]
    return ModelGraph(root=model.id, models=[model])
