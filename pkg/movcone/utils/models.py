import logging
import re
from collections import Counter
from enum import Enum
from fractions import Fraction
from typing import Annotated, Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    WithJsonSchema,
    model_validator,
)
from pydantic_core import PydanticCustomError

from .cones import (
    Cone,
    LinearMap,
    cone_from_generators,
    dot,
    dual_cone,
    is_primitive,
    is_subcone,
    is_zero,
    primitive,
)
from .errors import MissingModel, SmallRayPresent, UnknownRay

logger = logging.getLogger(__name__)

_RATIONAL = re.compile(r"\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?")


def parse_rational(value) -> Fraction:
    """Exact rational from an integer or a string such as ``"-3/2"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str):
        match = _RATIONAL.fullmatch(value)
        if match:
            numerator, denominator = match.groups()
            if denominator is None or int(denominator) != 0:
                return Fraction(int(numerator), int(denominator or 1))
            raise PydanticCustomError(
                "rational_parsing",
                "invalid rational {value}: zero denominator",
                {"value": value},
            )
    raise PydanticCustomError(
        "rational_parsing",
        "invalid rational {value}: expected an integer or a string 'p/q'",
        {"value": repr(value)},
    )


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": r"^[+-]?\d+(/\d+)?$"}),
]
Vector = tuple[Rational, ...]
Matrix = tuple[Vector, ...]


class RayKind(str, Enum):
    fibre = "fibre"
    divisorial = "divisorial"
    small = "small"


class ClassSpace(BaseModel):
    picard_rank: int = Field(ge=1)
    divisor_basis_labels: list[str]
    curve_coordinate_convention: Literal["dual-basis"] = "dual-basis"


class FlipSpec(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    source_ray: str | None = None
    target_model: str
    pushforward_matrix: Matrix
    flipped_curve: Vector

    def pushforward(self) -> LinearMap:
        return LinearMap(matrix=self.pushforward_matrix)


class ExtremalRayData(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    label: str
    generator: Vector
    kind: RayKind
    exceptional_divisor: Vector | None = None
    flip: FlipSpec | None = None

    @model_validator(mode="after")
    def link_flip(self):
        if self.flip is not None and self.flip.source_ray is None:
            self.flip.source_ray = self.label
        return self


class VarietyModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    id: str
    dimension: int
    space: ClassSpace
    canonical_class: Vector
    mori_generators: list[Vector]
    extremal_rays: list[ExtremalRayData] = []
    fano: bool = False
    k_nonneg_curves: list[Vector] = []
    declared_nef_generators: list[Vector] | None = None
    declared_eff_generators: list[Vector] | None = None

    @property
    def rho(self) -> int:
        return self.space.picard_rank

    def ray(self, label: str) -> ExtremalRayData:
        for ray in self.extremal_rays:
            if ray.label == label:
                return ray
        raise UnknownRay(f"model '{self.id}' has no extremal ray labelled '{label}'")

    def mori_cone(self) -> Cone:
        return cone_from_generators(self.mori_generators, self.rho)

    def ray_name(self, vector) -> str:
        key = primitive(vector)
        for ray in self.extremal_rays:
            if not is_zero(ray.generator) and primitive(ray.generator) == key:
                return ray.label
        return "(" + ",".join(str(x) for x in key) + ")"


class ModelGraphDocument(BaseModel):
    """A root model and the birational models its flips lead to."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    format_version: int = 1
    root: str
    models: list[VarietyModel]
    notes: list[str] = []

    def get(self, model_id: str) -> VarietyModel:
        for model in self.models:
            if model.id == model_id:
                return model
        raise MissingModel(model_id)

    @property
    def root_model(self) -> VarietyModel:
        return self.get(self.root)

    def flip(self, model_id: str, ray_label: str) -> FlipSpec:
        ray = self.get(model_id).ray(ray_label)
        if ray.flip is None:
            raise UnknownRay(f"ray '{ray_label}' of model '{model_id}' has no flip data")
        return ray.flip


ModelGraph = ModelGraphDocument


class ValidationReport(BaseModel):
    subject: str
    issues: list[str] = []

    @property
    def ok(self) -> bool:
        return not self.issues


def _shape_issues(m: VarietyModel) -> list[str]:
    rho = m.rho
    issues = []

    def check(name, vector):
        if len(vector) != rho:
            issues.append(f"{name} has length {len(vector)}, expected {rho}")

    check("canonical class", m.canonical_class)
    for i, generator in enumerate(m.mori_generators):
        check(f"Mori generator {i}", generator)
    for i, curve in enumerate(m.k_nonneg_curves):
        check(f"k_nonneg curve {i}", curve)
    for name in ("declared_nef_generators", "declared_eff_generators"):
        for i, generator in enumerate(getattr(m, name) or []):
            check(f"{name} {i}", generator)
    for ray in m.extremal_rays:
        check(f"ray {ray.label}", ray.generator)
        if ray.exceptional_divisor is not None:
            check(f"exceptional divisor of ray {ray.label}", ray.exceptional_divisor)
        if ray.flip is not None:
            check(f"flipped curve of ray {ray.label}", ray.flip.flipped_curve)
            shape = {len(row) for row in ray.flip.pushforward_matrix}
            if len(ray.flip.pushforward_matrix) != rho or shape != {rho}:
                issues.append(f"pushforward matrix of ray {ray.label} is not {rho}x{rho}")
    return issues


def _ray_issues(m: VarietyModel, ray: ExtremalRayData, mori: Cone) -> list[str]:
    issues = []
    label = ray.label
    if is_zero(ray.generator):
        return [f"ray {label}: generator is zero"]
    if not is_primitive(ray.generator):
        issues.append(f"ray {label}: generator is not primitive")
    if primitive(ray.generator) not in mori.rays:
        issues.append(f"ray {label}: generator is not an extreme ray of the Mori cone")

    k_degree = dot(m.canonical_class, ray.generator)
    if k_degree >= 0:
        issues.append(f"ray {label}: extremal ray data must be K-negative, K.{label} = {k_degree}")

    if ray.kind is RayKind.divisorial:
        if ray.exceptional_divisor is None:
            issues.append(f"divisorial ray {label} without exceptional divisor")
        elif dot(ray.exceptional_divisor, ray.generator) >= 0:
            issues.append(f"exceptional divisor of ray {label} is not negative on it")
    elif ray.exceptional_divisor is not None:
        issues.append(f"{ray.kind.value} ray {label} carries an exceptional divisor")

    if ray.kind is not RayKind.small:
        if ray.flip is not None:
            issues.append(f"{ray.kind.value} ray {label} carries flip data")
        return issues

    if ray.flip is None:
        issues.append(f"small ray without flip data: {label}")
    else:
        if ray.flip.source_ray != label:
            issues.append(f"flip under ray {label} declares source ray {ray.flip.source_ray}")
        if not ray.flip.pushforward().is_invertible():
            issues.append(f"pushforward matrix of ray {label} is not invertible")
        if not is_primitive(ray.flip.flipped_curve):
            issues.append(f"flipped curve of ray {label} is not a nonzero primitive vector")
    if m.dimension == 4 and k_degree < 0 and k_degree != -1:
        issues.append(
            f"small ray {label}: K.{label} = {k_degree}, expected -1; "
            "use the primitive class along the ray"
        )
    if m.dimension == 3 and m.fano:
        issues.append(f"small ray {label} on a Fano threefold")
    return issues


def validate_model(m: VarietyModel) -> ValidationReport:
    """Check the internal consistency of one numerical model.

    Problems are collected, never raised. An empty report means the
    K-negative extreme rays of the Mori cone are classified exactly once,
    the Fano flag agrees with the signs of K_X, ``k_nonneg_curves`` lists
    exactly the K-nonnegative extreme rays and declared nef generators
    span the dual of the Mori cone.
    """
    report = ValidationReport(subject=f"model {m.id}")
    issues = report.issues

    if m.dimension not in (3, 4):
        issues.append(f"dimension {m.dimension} is not 3 or 4")
    labels = m.space.divisor_basis_labels
    if len(labels) != m.rho or len(set(labels)) != len(labels):
        issues.append(f"divisor basis needs {m.rho} distinct labels, got {labels}")
    shape_issues = _shape_issues(m)
    if shape_issues:
        issues.extend(shape_issues)
        return report

    mori = m.mori_cone()
    canonical = m.canonical_class
    if mori.is_zero:
        issues.append("Mori cone has no nonzero generators")

    ray_labels = Counter(ray.label for ray in m.extremal_rays)
    issues.extend(f"ray label {label} is used {n} times" for label, n in ray_labels.items() if n > 1)
    for ray in m.extremal_rays:
        issues.extend(_ray_issues(m, ray, mori))

    classified = Counter(
        primitive(ray.generator) for ray in m.extremal_rays if not is_zero(ray.generator)
    )
    for extreme in mori.rays:
        if dot(canonical, extreme) >= 0:
            continue
        if classified[extreme] == 0:
            issues.append(f"K-negative extreme ray {m.ray_name(extreme)} is not classified")
        elif classified[extreme] > 1:
            issues.append(f"extreme ray {m.ray_name(extreme)} is classified {classified[extreme]} times")

    if m.fano:
        if not mori.is_pointed:
            issues.append("Mori cone of a Fano model is not pointed")
        for generator in mori.generators:
            if dot(canonical, generator) >= 0:
                issues.append(f"K_X not negative on ray {m.ray_name(generator)}")

    ledger = set()
    for curve in m.k_nonneg_curves:
        if is_zero(curve):
            issues.append("k_nonneg_curves contains the zero vector")
        else:
            ledger.add(primitive(curve))
    k_nonneg = {extreme for extreme in mori.rays if dot(canonical, extreme) >= 0}
    for extreme in sorted(k_nonneg - ledger):
        issues.append(f"K-nonnegative extreme ray {m.ray_name(extreme)} missing from k_nonneg_curves")
    for curve in sorted(ledger - k_nonneg):
        issues.append(
            f"k_nonneg_curves entry {m.ray_name(curve)} is not a K-nonnegative extreme ray of the Mori cone"
        )

    nef = dual_cone(mori)
    if m.declared_nef_generators is not None:
        if cone_from_generators(m.declared_nef_generators, m.rho) != nef:
            issues.append("declared nef generators do not span the dual of the Mori cone")
    if m.declared_eff_generators is not None:
        if not is_subcone(nef, cone_from_generators(m.declared_eff_generators, m.rho)):
            issues.append("declared effective cone does not contain the nef cone")

    logger.debug("validated model %s: %d issues", m.id, len(issues))
    return report


def nef_cone(m: VarietyModel) -> Cone:
    return dual_cone(m.mori_cone())


def small_rays(m: VarietyModel) -> list[ExtremalRayData]:
    """K-negative small rays of ``m`` in declaration order."""
    rays = [
        ray
        for ray in m.extremal_rays
        if ray.kind is RayKind.small and dot(m.canonical_class, ray.generator) < 0
    ]
    if rays and m.dimension == 3 and m.fano:
        raise SmallRayPresent(f"Fano threefold '{m.id}' declares small rays")
    return rays
