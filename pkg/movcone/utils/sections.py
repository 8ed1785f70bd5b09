import logging
from fractions import Fraction
from functools import cmp_to_key
from typing import Sequence

import sympy as sp

from .cones import Cone, RationalVector, as_vector, dot, from_sympy, scale
from .documents import SectionDocument
from .equations import moving_cone_on_model
from .errors import DimensionMismatch, NotSliceable
from .models import ModelGraph, nef_cone

logger = logging.getLogger(__name__)


def _chart(plane_normal: RationalVector) -> tuple[RationalVector, RationalVector]:
    basis = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in plane_normal]]).nullspace()
    return tuple(tuple(from_sympy(x) for x in vector) for vector in basis)


def _half(point) -> int:
    x, y = point
    return 0 if y > 0 or (y == 0 and x > 0) else 1


def _by_angle(a, b) -> int:
    if _half(a) != _half(b):
        return _half(a) - _half(b)
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def cross_section(c: Cone, plane_normal: Sequence) -> list[RationalVector]:
    """Polygon cut out of a cone in N_1 of rank 3 by the plane ``x.n = 1``.

    Each extreme ray is scaled onto the plane. Vertices run counter-clockwise
    in the chart given by the nullspace basis of ``n`` and start at the
    lexicographically smallest vertex.
    """
    normal = as_vector(plane_normal)
    if c.dim != 3 or len(normal) != 3:
        raise DimensionMismatch("cross-sections are drawn for Picard rank 3 only")
    vertices = []
    for ray in c.generators:
        height = dot(ray, normal)
        if height <= 0:
            raise NotSliceable(f"ray {ray} does not meet the plane x.n = 1 for n = {normal}")
        vertices.append(scale(1 / height, ray))
    if len(vertices) <= 2:
        return sorted(vertices)

    u, v = _chart(normal)
    centroid = scale(Fraction(1, len(vertices)), [sum(x) for x in zip(*vertices)])
    offsets = {vertex: [a - b for a, b in zip(vertex, centroid)] for vertex in vertices}
    charted = {vertex: (dot(u, offset), dot(v, offset)) for vertex, offset in offsets.items()}
    ordered = sorted(vertices, key=cmp_to_key(lambda a, b: _by_angle(charted[a], charted[b])))
    start = ordered.index(min(ordered))
    logger.debug("cross-section with %d vertices", len(ordered))
    return ordered[start:] + ordered[:start]


SECTION_CONES = ("mor", "mov", "nef")


def section_cone(graph: ModelGraph, cone: str, model_id: str | None = None) -> Cone:
    model = graph.get(model_id) if model_id else graph.root_model
    if cone == "mor":
        return model.mori_cone()
    if cone == "nef":
        return nef_cone(model)
    if cone == "mov":
        return moving_cone_on_model(graph, model.id)
    raise ValueError(f"unknown cone '{cone}', expected one of {', '.join(SECTION_CONES)}")


def slice_graph(
    graph: ModelGraph, cone: str, plane_normal: Sequence, model_id: str | None = None
) -> SectionDocument:
    model_id = model_id or graph.root
    vertices = cross_section(section_cone(graph, cone, model_id), plane_normal)
    return SectionDocument(model_id=model_id, cone=cone, plane=as_vector(plane_normal), vertices=vertices)
