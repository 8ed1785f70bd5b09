import logging
from typing import Iterator, Sequence

from pydantic import BaseModel

from .cones import RationalVector, add, dot, is_zero, negate, primitive, scale
from .errors import CycleDetected, MovConeError, UnknownRay
from .models import (
    FlipSpec,
    ModelGraph,
    RayKind,
    ValidationReport,
    VarietyModel,
    small_rays,
    validate_model,
)

logger = logging.getLogger(__name__)


class FlipStep(BaseModel):
    model_id: str
    ray_label: str


class FlipSequence(BaseModel):
    steps: list[FlipStep]
    terminal_model: str

    @property
    def length(self) -> int:
        return len(self.steps)

    def prefixes(self) -> Iterator[tuple[list[FlipStep], str]]:
        for k in range(1, self.length + 1):
            reached = self.steps[k].model_id if k < self.length else self.terminal_model
            yield self.steps[:k], reached

    def describe(self) -> str:
        chain = [self.steps[0].model_id] + [model_id for _, model_id in self.prefixes()]
        return f"{self.steps[0].ray_label}: {' -> '.join(chain)} (len {self.length})"


def pushforward_divisor(f: FlipSpec, d: Sequence) -> RationalVector:
    return f.pushforward().apply(d)


def pullback_divisor(f: FlipSpec, d: Sequence) -> RationalVector:
    return f.pushforward().inverse().apply(d)


def numerical_pullback_curve(f: FlipSpec, c: Sequence) -> RationalVector:
    return f.pushforward().transpose().apply(c)


def numerical_pushforward_curve(f: FlipSpec, c: Sequence) -> RationalVector:
    return f.pushforward().inverse().transpose().apply(c)


def strict_transform_curve(f: FlipSpec, c: Sequence, incidence: int = 0) -> RationalVector:
    # incidence: multiplicity with which the flipped curve splits off
    if incidence < 0:
        raise ValueError("the incidence multiplicity of a strict transform is non-negative")
    return add(numerical_pushforward_curve(f, c), scale(-incidence, f.flipped_curve))


def reverse_flip(source: VarietyModel, f: FlipSpec) -> FlipSpec:
    contracted = source.ray(f.source_ray).generator
    return FlipSpec(
        target_model=source.id,
        pushforward_matrix=f.pushforward().inverse().matrix,
        flipped_curve=contracted,
    )


def _format(vector) -> str:
    return "(" + ",".join(str(x) for x in vector) + ")"


def _transport_issues(
    source: VarietyModel, f: FlipSpec, target: VarietyModel, contracted
) -> list[str]:
    issues = []
    if f.target_model != target.id:
        issues.append(f"flip targets '{f.target_model}', not '{target.id}'")
    rho = source.rho
    matrix = f.pushforward_matrix
    if target.rho != rho or len(matrix) != rho or {len(row) for row in matrix} != {rho}:
        issues.append(f"pushforward matrix does not map N^1 of rank {rho} to rank {target.rho}")
        return issues
    if not f.pushforward().is_invertible():
        issues.append("pushforward matrix is not invertible")
        return issues

    if numerical_pullback_curve(f, f.flipped_curve) != negate(tuple(contracted)):
        issues.append("check (a): pullback of flipped curve != -s")
    if pushforward_divisor(f, source.canonical_class) != tuple(target.canonical_class):
        issues.append("check (c): canonical class of the target is not the pushforward of K_X")
    return issues


def verify_transport(
    source: VarietyModel, f: FlipSpec, target: VarietyModel, contracted=None
) -> ValidationReport:
    """Direction-free part of :func:`verify_flip`: checks (a) and (c).

    ``contracted`` defaults to the generator of ``f.source_ray``; pass the
    original flipped curve when checking data built by :func:`reverse_flip`.
    """
    report = ValidationReport(subject=f"transport {source.id} -> {target.id}")
    if contracted is None:
        contracted = source.ray(f.source_ray).generator
    report.issues.extend(_transport_issues(source, f, target, contracted))
    return report


def verify_flip(source: VarietyModel, f: FlipSpec, target: VarietyModel) -> ValidationReport:
    report = ValidationReport(subject=f"flip {source.id}:{f.source_ray} -> {target.id}")
    issues = report.issues
    try:
        ray = source.ray(f.source_ray)
    except UnknownRay as error:
        issues.append(str(error))
        return report
    if ray.kind is not RayKind.small:
        issues.append(f"ray {ray.label} is not small")

    transport = _transport_issues(source, f, target, ray.generator)
    issues.extend(transport)
    if any(not issue.startswith("check") for issue in transport):
        return report

    k_source = dot(source.canonical_class, ray.generator)
    if k_source != -1:
        issues.append(f"check (b): K_X.s = {k_source}, expected -1")
    k_target = dot(target.canonical_class, f.flipped_curve)
    if k_target != 1:
        issues.append(f"check (b): K_X+.s+ = {k_target}, expected 1")

    transported = [numerical_pushforward_curve(f, c) for c in source.k_nonneg_curves]
    expected = {primitive(f.flipped_curve)} | {primitive(c) for c in transported if not is_zero(c)}
    declared = {primitive(c) for c in target.k_nonneg_curves if not is_zero(c)}
    if expected != declared:
        missing = ", ".join(_format(c) for c in sorted(expected - declared)) or "none"
        unexpected = ", ".join(_format(c) for c in sorted(declared - expected)) or "none"
        issues.append(
            "check (d): k_nonneg_curves of the target differ from the transported ledger; "
            f"missing {missing}, unexpected {unexpected}"
        )
    mori = target.mori_cone()
    actual = {r for r in mori.rays if dot(target.canonical_class, r) >= 0}
    if expected != actual:
        issues.append(
            "check (d): transported K-nonnegative classes are not the "
            "K-nonnegative extreme rays of the target Mori cone"
        )

    for curve in transported:
        degree = dot(target.canonical_class, curve)
        if degree != 1:
            issues.append(f"check (e): transported class {_format(curve)} has K = {degree}, expected 1")

    logger.debug("verified %s: %d issues", report.subject, len(issues))
    return report


def verify_graph(graph: ModelGraph) -> list[ValidationReport]:
    reports = [validate_model(model) for model in graph.models]
    for model in graph.models:
        for ray in model.extremal_rays:
            if ray.flip is None:
                continue
            try:
                target = graph.get(ray.flip.target_model)
                reports.append(verify_flip(model, ray.flip, target))
            except MovConeError as error:
                reports.append(
                    ValidationReport(subject=f"flip {model.id}:{ray.label}", issues=[str(error)])
                )
    return reports


def enumerate_pmc_sequences(
    models: ModelGraph, start: str, start_ray: str | None = None
) -> list[FlipSequence]:
    """All maximal chains of flips of K-negative small rays from ``start``.

    Each chain ends at a model without K-negative small rays. A model that
    repeats along one chain raises :class:`CycleDetected`; flips cannot
    cycle, so the data is inconsistent.
    """
    first = small_rays(models.get(start))
    if start_ray is not None:
        first = [ray for ray in first if ray.label == start_ray]
        if not first:
            raise UnknownRay(f"model '{start}' has no K-negative small ray labelled '{start_ray}'")

    sequences = []

    def walk(model_id, rays, steps, chain):
        for ray in rays:
            if ray.flip is None:
                raise UnknownRay(f"small ray '{ray.label}' of model '{model_id}' has no flip data")
            target_id = ray.flip.target_model
            target = models.get(target_id)
            if target_id in chain:
                raise CycleDetected(chain + [target_id])
            path = steps + [FlipStep(model_id=model_id, ray_label=ray.label)]
            next_rays = small_rays(target)
            if next_rays:
                walk(target_id, next_rays, path, chain + [target_id])
            else:
                sequences.append(FlipSequence(steps=path, terminal_model=target_id))

    walk(start, first, [], [start])
    sequences.sort(key=lambda s: [(step.model_id, step.ray_label) for step in s.steps])
    logger.debug("found %d pmc-flip sequences from %s", len(sequences), start)
    return sequences


def pullback_along(graph: ModelGraph, prefix: list[FlipStep], d: Sequence) -> RationalVector:
    """Pull a divisor class on the model reached by ``prefix`` back to the start."""
    d = tuple(d)
    for step in reversed(prefix):
        d = pullback_divisor(graph.flip(step.model_id, step.ray_label), d)
    return d


def pushforward_along(graph: ModelGraph, prefix: list[FlipStep], c: Sequence) -> RationalVector:
    c = tuple(c)
    for step in prefix:
        c = numerical_pushforward_curve(graph.flip(step.model_id, step.ray_label), c)
    return c
