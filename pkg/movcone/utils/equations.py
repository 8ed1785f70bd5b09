import logging
from typing import Literal, Sequence

from pydantic import BaseModel, ConfigDict

from .cones import (
    Cone,
    LinearMap,
    apply_map,
    cone_from_generators,
    cone_from_inequalities,
    contains,
    dual_cone,
    is_zero,
    primitive,
)
from .errors import (
    DimensionMismatch,
    MissingEffData,
    NonPointedResult,
    NotFano,
    SmallRayPresent,
    UnknownRay,
)
from .flips import (
    FlipStep,
    enumerate_pmc_sequences,
    pullback_along,
    pushforward_along,
)
from .models import (
    ExtremalRayData,
    ModelGraph,
    RayKind,
    ValidationReport,
    VarietyModel,
    Vector,
    nef_cone,
    small_rays,
)

logger = logging.getLogger(__name__)


class Provenance(BaseModel):
    kind: Literal["nef-of", "exceptional-of"]
    model_id: str
    sequence: list[FlipStep] = []
    ray_label: str | None = None

    def describe(self) -> str:
        route = "".join(f" {step.model_id}:{step.ray_label} ->" for step in self.sequence)
        source = f"{self.model_id}" if self.ray_label is None else f"{self.model_id}:{self.ray_label}"
        return f"{self.kind}{route} {source}"


class EquationClass(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    vector: Vector
    provenance: Provenance


class EquationSet(BaseModel):
    root: str
    classes: list[EquationClass] = []

    def add(self, vector: Sequence, provenance: Provenance) -> bool:
        if is_zero(vector):
            return False
        ray = primitive(vector)
        # the first witness of a ray keeps its provenance
        if any(primitive(known.vector) == ray for known in self.classes):
            return False
        self.classes.append(EquationClass(vector=ray, provenance=provenance))
        return True

    def merge(self, other: "EquationSet") -> None:
        for known in other.classes:
            self.add(known.vector, known.provenance)

    def sort(self) -> "EquationSet":
        self.classes.sort(key=lambda known: tuple(known.vector))
        return self

    def vectors(self) -> list[tuple]:
        return [tuple(known.vector) for known in self.classes]


def _reached(graph: ModelGraph, prefix: list[FlipStep], model: VarietyModel) -> None:
    if not prefix:
        if model.id != graph.root:
            raise UnknownRay(f"the empty flip route reaches '{graph.root}', not '{model.id}'")
        return
    last = prefix[-1]
    target = graph.flip(last.model_id, last.ray_label).target_model
    if target != model.id:
        raise UnknownRay(f"the flip route ends at '{target}', not '{model.id}'")


def eq_nef_of_model(graph: ModelGraph, sequence_prefix: list[FlipStep], model: VarietyModel) -> list[tuple]:
    _reached(graph, sequence_prefix, model)
    return [
        primitive(pullback_along(graph, sequence_prefix, generator))
        for generator in nef_cone(model).generators
    ]


def eq_div_of_model(graph: ModelGraph, sequence_prefix: list[FlipStep], model: VarietyModel) -> list[tuple]:
    _reached(graph, sequence_prefix, model)
    return [
        primitive(pullback_along(graph, sequence_prefix, ray.exceptional_divisor))
        for ray in model.extremal_rays
        if ray.kind is RayKind.divisorial and ray.exceptional_divisor is not None
    ]


def _add_model(
    equations: EquationSet, graph: ModelGraph, prefix: list[FlipStep], model: VarietyModel
) -> None:
    for vector in eq_nef_of_model(graph, prefix, model):
        equations.add(vector, Provenance(kind="nef-of", model_id=model.id, sequence=prefix))
    divisorial = [
        ray
        for ray in model.extremal_rays
        if ray.kind is RayKind.divisorial and ray.exceptional_divisor is not None
    ]
    for ray, vector in zip(divisorial, eq_div_of_model(graph, prefix, model)):
        equations.add(
            vector,
            Provenance(kind="exceptional-of", model_id=model.id, sequence=prefix, ray_label=ray.label),
        )


def eq_for_ray(graph: ModelGraph, root: VarietyModel, ray: ExtremalRayData) -> EquationSet:
    # intermediate models count as well as terminal ones; the root itself does not
    equations = EquationSet(root=root.id)
    for sequence in enumerate_pmc_sequences(graph, root.id, ray.label):
        for prefix, model_id in sequence.prefixes():
            _add_model(equations, graph, prefix, graph.get(model_id))
    logger.debug("Eq(%s:%s) has %d classes", root.id, ray.label, len(equations.classes))
    return equations.sort()


def eq_for_variety(graph: ModelGraph, root: VarietyModel | None = None) -> EquationSet:
    root = root or graph.root_model
    if not root.fano:
        raise NotFano(f"model '{root.id}' is not Fano")
    equations = EquationSet(root=root.id)
    _add_model(equations, graph, [], root)
    for ray in small_rays(root):
        equations.merge(eq_for_ray(graph, root, ray))
    logger.debug("Eq(%s) has %d classes", root.id, len(equations.classes))
    return equations.sort()


def moving_cone(graph: ModelGraph, root: VarietyModel | None = None) -> Cone:
    root = root or graph.root_model
    equations = eq_for_variety(graph, root)
    cone = cone_from_inequalities(equations.vectors(), root.rho)
    if not cone.is_pointed:
        raise NonPointedResult(f"Mov({root.id}) has lineality {list(cone.lineality)}; the input data is inconsistent")
    return cone


def equation_cone(graph: ModelGraph, root: VarietyModel | None = None) -> Cone:
    """Cone spanned by Eq(X); its dual is Mov(X)."""
    root = root or graph.root_model
    return cone_from_generators(eq_for_variety(graph, root).vectors(), root.rho)


def moving_cone_threefold(m: VarietyModel) -> Cone:
    """Mov(X) of a Fano threefold from its nef cone and exceptional divisors alone."""
    if m.dimension != 3:
        raise DimensionMismatch(f"model '{m.id}' has dimension {m.dimension}, not 3")
    if any(ray.kind is RayKind.small for ray in m.extremal_rays):
        raise SmallRayPresent(f"threefold '{m.id}' declares a small ray")
    if not m.fano:
        raise NotFano(f"model '{m.id}' is not Fano")
    normals = list(nef_cone(m).generators)
    normals.extend(
        ray.exceptional_divisor
        for ray in m.extremal_rays
        if ray.kind is RayKind.divisorial and ray.exceptional_divisor is not None
    )
    return cone_from_inequalities(normals, m.rho)


def moving_cone_on_model(graph: ModelGraph, model_id: str, root: VarietyModel | None = None) -> Cone:
    """Image of Mov(X) in N_1 of a model on a pmc-flip sequence of the root."""
    root = root or graph.root_model
    cone = moving_cone(graph, root)
    if model_id == root.id:
        return cone
    for ray in small_rays(root):
        for sequence in enumerate_pmc_sequences(graph, root.id, ray.label):
            for prefix, reached in sequence.prefixes():
                if reached != model_id:
                    continue
                columns = [
                    pushforward_along(graph, prefix, tuple(int(i == j) for j in range(root.rho)))
                    for i in range(root.rho)
                ]
                return apply_map(LinearMap(matrix=tuple(zip(*columns))), cone)
    raise UnknownRay(f"model '{model_id}' does not appear on a pmc-flip sequence of '{root.id}'")


def _format(vector) -> str:
    return "(" + ",".join(str(x) for x in vector) + ")"


def crosscheck_bdpp(graph: ModelGraph, root: VarietyModel | None = None) -> ValidationReport:
    root = root or graph.root_model
    if root.declared_eff_generators is None:
        raise MissingEffData(f"model '{root.id}' declares no effective generators")
    report = ValidationReport(subject=f"BDPP cross-check {root.id}")
    eff_dual = dual_cone(cone_from_generators(root.declared_eff_generators, root.rho))
    mov = moving_cone(graph, root)
    for ray in eff_dual.generators:
        if not contains(mov, ray):
            report.issues.append(f"duals differ on test ray {_format(ray)}: in the dual of Eff but not in Mov")
    for ray in mov.generators:
        if not contains(eff_dual, ray):
            report.issues.append(f"duals differ on test ray {_format(ray)}: in Mov but not in the dual of Eff")
    return report
