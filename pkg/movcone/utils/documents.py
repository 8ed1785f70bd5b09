import json
import logging
from collections import Counter
from pathlib import Path
from typing import Sequence

from pydantic import BaseModel, ConfigDict, ValidationError

from .cones import Cone, as_vector
from .errors import ParseError, SchemaError
from .models import ModelGraph, Vector, format_rational, parse_rational

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class ConeDocument(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    dim: int
    rays: list[Vector]
    lineality: list[Vector]
    facets: list[Vector]
    equations: list[Vector]


class SectionDocument(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    model_id: str
    cone: str
    plane: Vector
    vertices: list[Vector]


def cone_document(c: Cone) -> ConeDocument:
    return ConeDocument(
        dim=c.dim,
        rays=list(c.rays),
        lineality=list(c.lineality),
        facets=list(c.facets),
        equations=list(c.equations),
    )


def _location(error: dict) -> str:
    return ".".join(str(part) for part in error["loc"]) or "document"


def schema_violations(graph: ModelGraph) -> list[str]:
    violations = []
    if graph.format_version != FORMAT_VERSION:
        violations.append(f"unsupported format_version {graph.format_version}")
    ids = Counter(model.id for model in graph.models)
    violations.extend(f"duplicate model id '{model_id}'" for model_id, n in ids.items() if n > 1)
    if graph.root not in ids:
        violations.append(f"root '{graph.root}' is not a declared model")
    for model in graph.models:
        for ray in model.extremal_rays:
            if ray.flip is not None and ray.flip.target_model not in ids:
                violations.append(
                    f"flip of {model.id}:{ray.label} targets undeclared model '{ray.flip.target_model}'"
                )
    return violations


def parse_graph(data, source: str = "document") -> ModelGraph:
    try:
        graph = ModelGraph.model_validate(data)
    except ValidationError as error:
        errors = error.errors()
        for item in errors:
            if item["type"] == "rational_parsing":
                raise ParseError(f"{source}: {_location(item)}: {item['msg']}") from None
        raise SchemaError([f"{_location(item)}: {item['msg']}" for item in errors]) from None
    violations = schema_violations(graph)
    if violations:
        raise SchemaError(violations)
    return graph


def load_graph(path: str | Path) -> ModelGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ParseError(f"{path}: {error.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ParseError(f"{path}:{error.lineno}:{error.colno}: {error.msg}") from None
    graph = parse_graph(data, str(path))
    logger.debug("loaded %s: %d models, root %s", path, len(graph.models), graph.root)
    return graph


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_graph(graph: ModelGraph, path: str | Path | None = None) -> str:
    text = dump_json(graph.model_dump(mode="json", exclude_none=True))
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def format_vector(vector: Sequence) -> str:
    return ",".join(format_rational(x) for x in as_vector(vector))


def format_vectors(vectors: Sequence[Sequence]) -> str:
    return ";".join(format_vector(vector) for vector in vectors)


def parse_vectors(text: str) -> list[tuple]:
    """Vectors from ``"1,0;0,-1/2"``; an empty string is the empty list."""
    vectors = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        try:
            vectors.append(tuple(parse_rational(token.strip()) for token in chunk.split(",")))
        except ValueError as error:
            raise ParseError(f"invalid vector '{chunk}': {error}") from None
    return vectors


def format_class(vector: Sequence, labels: Sequence[str]) -> str:
    """Divisor class as a combination of basis labels, e.g. ``-Gamma+Lambda+E``."""
    terms = []
    for coefficient, label in zip(as_vector(vector), labels):
        if coefficient == 0:
            continue
        if coefficient == 1:
            term = label
        elif coefficient == -1:
            term = f"-{label}"
        else:
            term = f"{format_rational(coefficient)}*{label}"
        if terms and not term.startswith("-"):
            term = "+" + term
        terms.append(term)
    return "".join(terms) or "0"


def parse_vector(text: str) -> tuple:
    vectors = parse_vectors(text)
    if len(vectors) != 1:
        raise ParseError(f"expected exactly one vector, got '{text}'")
    return vectors[0]
