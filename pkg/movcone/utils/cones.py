import logging
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence

import ppl
import sympy as sp
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import DimensionMismatch, SingularMatrix

logger = logging.getLogger(__name__)

RationalVector = tuple[Fraction, ...]
IntegerVector = tuple[int, ...]


def as_vector(coords: Iterable) -> RationalVector:
    return tuple(Fraction(x) for x in coords)


def from_sympy(value: sp.Rational) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"cannot pair vectors of lengths {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Sequence, v: Sequence) -> RationalVector:
    if len(u) != len(v):
        raise DimensionMismatch(f"cannot add vectors of lengths {len(u)} and {len(v)}")
    return tuple(Fraction(a) + Fraction(b) for a, b in zip(u, v))


def scale(factor, v: Sequence) -> RationalVector:
    return tuple(Fraction(factor) * Fraction(x) for x in v)


def negate(v: Sequence) -> tuple:
    return tuple(-x for x in v)


def is_zero(v: Sequence) -> bool:
    return not any(v)


def primitive(v: Sequence) -> IntegerVector:
    """Canonical representative of the ray spanned by ``v``."""
    coords = as_vector(v)
    if is_zero(coords):
        raise ValueError("the zero vector does not span a ray")
    denominator = reduce(lcm, (x.denominator for x in coords), 1)
    integers = [int(x * denominator) for x in coords]
    divisor = reduce(gcd, integers, 0)
    return tuple(x // divisor for x in integers)


def is_primitive(v: Sequence) -> bool:
    coords = as_vector(v)
    if is_zero(coords) or any(x.denominator != 1 for x in coords):
        return False
    return reduce(gcd, (int(x) for x in coords), 0) == 1


def same_ray(u: Sequence, v: Sequence) -> bool:
    if is_zero(u) or is_zero(v):
        return is_zero(u) and is_zero(v)
    return primitive(u) == primitive(v)


def _linear_expression(v: IntegerVector) -> ppl.Linear_Expression:
    return sum((x * ppl.Variable(i) for i, x in enumerate(v) if x), ppl.Linear_Expression())


def _coefficients(item, dim: int) -> IntegerVector:
    coefficients = [int(c) for c in item.coefficients()]
    return primitive(coefficients + [0] * (dim - len(coefficients)))


def _canonical(
    rays: list[IntegerVector], lineality: list[IntegerVector], dim: int
) -> tuple[tuple[IntegerVector, ...], tuple[IntegerVector, ...]]:
    """Reduced lineality basis, rays projected orthogonally off the lineality."""
    if not lineality:
        return tuple(sorted(set(rays))), ()

    basis = sp.Matrix(lineality)
    reduced, _ = basis.rref()
    canonical_lineality = sorted(
        primitive([from_sympy(x) for x in reduced.row(i)])
        for i in range(reduced.rows)
        if any(reduced.row(i))
    )
    projector = sp.eye(dim) - basis.T * (basis * basis.T).inv() * basis
    canonical_rays = {
        primitive([from_sympy(x) for x in projector * sp.Matrix(ray)]) for ray in rays
    }
    return tuple(sorted(canonical_rays)), tuple(canonical_lineality)


def _cone(polyhedron: ppl.C_Polyhedron, dim: int) -> "Cone":
    rays, lines = [], []
    for generator in polyhedron.minimized_generators():
        if generator.is_ray():
            rays.append(_coefficients(generator, dim))
        elif generator.is_line():
            lines.append(_coefficients(generator, dim))
    facets, equations = [], []
    for constraint in polyhedron.minimized_constraints():
        if constraint.is_equality():
            equations.append(_coefficients(constraint, dim))
        else:
            facets.append(_coefficients(constraint, dim))
    rays, lineality = _canonical(rays, lines, dim)
    facets, equations = _canonical(facets, equations, dim)
    logger.debug(
        "cone in dimension %d: %d rays, lineality %d, %d facets",
        dim,
        len(rays),
        len(lineality),
        len(facets),
    )
    return Cone(dim=dim, rays=rays, lineality=lineality, facets=facets, equations=equations)


def _prepare(vectors: Iterable[Sequence], dim: int | None) -> tuple[list[IntegerVector], int]:
    vectors = [as_vector(v) for v in vectors]
    lengths = {len(v) for v in vectors}
    if dim is not None:
        lengths.add(dim)
    if len(lengths) > 1:
        raise DimensionMismatch(f"vectors of different lengths {sorted(lengths)}")
    if not lengths:
        raise DimensionMismatch("the dimension of an empty vector list must be given")
    dim = lengths.pop()
    if dim < 1:
        raise DimensionMismatch("cones live in spaces of dimension at least one")
    return [primitive(v) for v in vectors if not is_zero(v)], dim


def _with_opposites(rays, lineality) -> list[IntegerVector]:
    return list(rays) + list(lineality) + [negate(line) for line in lineality]


class Cone(BaseModel):
    """Rational polyhedral cone kept in both representations.

    ``rays`` are the extreme rays of the cone modulo its lineality space
    (projected orthogonally off it), ``lineality`` a reduced basis of that
    space. ``facets`` and ``equations`` are the same data for the dual cone.
    All stored vectors are primitive integer vectors in sorted order, so two
    cones describe the same set iff they compare equal.
    """

    model_config = ConfigDict(frozen=True)

    dim: int
    rays: tuple[IntegerVector, ...]
    lineality: tuple[IntegerVector, ...]
    facets: tuple[IntegerVector, ...]
    equations: tuple[IntegerVector, ...]

    @property
    def generators(self) -> list[IntegerVector]:
        return _with_opposites(self.rays, self.lineality)

    @property
    def facet_normals(self) -> list[IntegerVector]:
        return _with_opposites(self.facets, self.equations)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def is_full_dimensional(self) -> bool:
        return not self.equations

    @property
    def is_zero(self) -> bool:
        return not self.rays and not self.lineality

    def __contains__(self, v) -> bool:
        return contains(self, v)


def cone_from_generators(vectors: Iterable[Sequence], dim: int | None = None) -> Cone:
    generators, dim = _prepare(vectors, dim)
    polyhedron = ppl.C_Polyhedron(dim, "empty")
    polyhedron.add_generator(ppl.point())
    for generator in generators:
        polyhedron.add_generator(ppl.ray(_linear_expression(generator)))
    return _cone(polyhedron, dim)


def cone_from_inequalities(normals: Iterable[Sequence], dim: int | None = None) -> Cone:
    normals, dim = _prepare(normals, dim)
    polyhedron = ppl.C_Polyhedron(dim, "universe")
    for normal in normals:
        polyhedron.add_constraint(_linear_expression(normal) >= 0)
    return _cone(polyhedron, dim)


def dual_cone(c: Cone) -> Cone:
    return Cone(dim=c.dim, rays=c.facets, lineality=c.equations, facets=c.rays, equations=c.lineality)


def contains(c: Cone, v: Sequence) -> bool:
    if len(v) != c.dim:
        raise DimensionMismatch(f"vector of length {len(v)} tested against a cone in dimension {c.dim}")
    return all(dot(v, normal) >= 0 for normal in c.facet_normals)


def intersect(a: Cone, b: Cone) -> Cone:
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot intersect cones in dimensions {a.dim} and {b.dim}")
    return cone_from_inequalities(a.facet_normals + b.facet_normals, a.dim)


def is_subcone(a: Cone, b: Cone) -> bool:
    return all(contains(b, generator) for generator in a.generators)


class LinearMap(BaseModel):
    """Matrix of a linear map, ``rows`` = target dimension."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: tuple[RationalVector, ...]

    @field_validator("matrix", mode="before")
    @classmethod
    def rectangular(cls, value):
        matrix = tuple(as_vector(row) for row in value)
        if not matrix or len({len(row) for row in matrix}) != 1 or not matrix[0]:
            raise DimensionMismatch("a linear map needs a non-empty rectangular matrix")
        return matrix

    @classmethod
    def identity(cls, dim: int) -> "LinearMap":
        return cls(matrix=tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)))

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.matrix[0])

    def apply(self, v: Sequence) -> RationalVector:
        if len(v) != self.cols:
            raise DimensionMismatch(
                f"a {self.rows}x{self.cols} matrix cannot act on a vector of length {len(v)}"
            )
        return tuple(dot(row, v) for row in self.matrix)

    def transpose(self) -> "LinearMap":
        return LinearMap(matrix=tuple(zip(*self.matrix)))

    def compose(self, other: "LinearMap") -> "LinearMap":
        """``self`` after ``other``."""
        if self.cols != other.rows:
            raise DimensionMismatch("matrix shapes do not compose")
        columns = list(zip(*other.matrix))
        return LinearMap(matrix=tuple(tuple(dot(row, column) for column in columns) for row in self.matrix))

    def _sympy(self) -> sp.Matrix:
        return sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in row] for row in self.matrix])

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self._sympy().det() != 0

    def inverse(self) -> "LinearMap":
        if not self.is_invertible():
            raise SingularMatrix(f"the {self.rows}x{self.cols} matrix is not invertible")
        inverse = self._sympy().inv()
        return LinearMap(
            matrix=tuple(tuple(from_sympy(x) for x in inverse.row(i)) for i in range(inverse.rows))
        )


def apply_map(m: LinearMap, c: Cone) -> Cone:
    if m.cols != c.dim:
        raise DimensionMismatch(f"a map from dimension {m.cols} cannot act on a cone in dimension {c.dim}")
    return cone_from_generators([m.apply(generator) for generator in c.generators], m.rows)
