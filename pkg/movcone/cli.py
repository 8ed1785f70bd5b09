import argparse
import logging
import os
import sys

from movcone.utils.cones import cone_from_generators, cone_from_inequalities, dual_cone
from movcone.utils.documents import (
    cone_document,
    dump_json,
    format_class,
    format_vector,
    format_vectors,
    load_graph,
    parse_vector,
    parse_vectors,
)
from movcone.utils.equations import crosscheck_bdpp, eq_for_variety, moving_cone
from movcone.utils.errors import MovConeError, ValidationFailed
from movcone.utils.flips import enumerate_pmc_sequences, verify_graph
from movcone.utils.models import ModelGraph, small_rays
from movcone.utils.sections import SECTION_CONES, slice_graph

logger = logging.getLogger(__name__)

RED = "\033[31m"
GREEN = "\033[32m"
RESET = "\033[0m"


def _colour(text: str, code: str) -> str:
    if os.getenv("MOVCONE_COLOR", "1") == "0":
        return text
    return f"{code}{text}{RESET}"


def _print_reports(reports) -> None:
    for report in reports:
        status = _colour("ok", GREEN) if report.ok else _colour("FAIL", RED)
        print(f"{status} {report.subject}", file=sys.stderr)
        for issue in report.issues:
            print(f"  - {issue}", file=sys.stderr)


def _emit(args, payload, lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(dump_json(payload))
    else:
        for line in lines:
            print(line)


def _verified_graph(path) -> ModelGraph:
    graph = load_graph(path)
    failed = [report for report in verify_graph(graph) if not report.ok]
    if failed:
        raise ValidationFailed(failed)
    return graph


def run_validate(args) -> int:
    graph = load_graph(args.file)
    reports = verify_graph(graph)
    _print_reports(reports)
    failed = [report for report in reports if not report.ok]
    summary = f"{len(reports) - len(failed)} of {len(reports)} checks passed"
    _emit(args, [report.model_dump() for report in reports], [summary])
    return ValidationFailed.exit_code if failed else 0


def run_sequences(args) -> int:
    graph = load_graph(args.file)
    root = graph.root_model
    sequences = []
    for ray in small_rays(root):
        sequences.extend(enumerate_pmc_sequences(graph, root.id, ray.label))
    _emit(
        args,
        [sequence.model_dump() for sequence in sequences],
        [sequence.describe() for sequence in sequences],
    )
    return 0


def run_eq(args) -> int:
    graph = _verified_graph(args.file)
    equations = eq_for_variety(graph)
    labels = graph.root_model.space.divisor_basis_labels
    lines = [
        f"{format_vector(known.vector)}\t{format_class(known.vector, labels)}\t{known.provenance.describe()}"
        for known in equations.classes
    ]
    _emit(args, equations.model_dump(mode="json"), lines)
    return 0


def run_mov(args) -> int:
    graph = _verified_graph(args.file)
    cone = moving_cone(graph)
    _emit(args, cone_document(cone).model_dump(mode="json"), [format_vectors(cone.rays)])
    if args.crosscheck:
        report = crosscheck_bdpp(graph)
        _print_reports([report])
        if not report.ok:
            return ValidationFailed.exit_code
    return 0


def run_dual(args) -> int:
    if args.gens is not None:
        vectors = parse_vectors(args.gens)
        result = dual_cone(cone_from_generators(vectors, args.dim))
    else:
        vectors = parse_vectors(args.ineqs)
        result = cone_from_inequalities(vectors, args.dim)
    _emit(args, cone_document(result).model_dump(mode="json"), [format_vectors(result.generators)])
    return 0


def run_slice(args) -> int:
    graph = _verified_graph(args.file)
    section = slice_graph(graph, args.cone, parse_vector(args.plane), args.model)
    _emit(args, section.model_dump(mode="json"), [format_vector(vertex) for vertex in section.vertices])
    return 0


def build_parser() -> argparse.ArgumentParser:
    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--json", action="store_true", help="emit machine-readable JSON on stdout")

    parser = argparse.ArgumentParser(
        prog="movcone",
        description="Moving cones of Fano threefolds and fourfolds from declared flip data.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log algorithm progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", parents=[output], help="validate every model and flip")
    validate.add_argument("file")
    validate.set_defaults(handler=run_validate)

    sequences = commands.add_parser("sequences", parents=[output], help="list pmc-flip sequences of the root")
    sequences.add_argument("file")
    sequences.set_defaults(handler=run_sequences)

    eq = commands.add_parser("eq", parents=[output], help="print Eq(X) with provenance")
    eq.add_argument("file")
    eq.set_defaults(handler=run_eq)

    mov = commands.add_parser("mov", parents=[output], help="print the extreme rays of Mov(X)")
    mov.add_argument("file")
    mov.add_argument(
        "--crosscheck",
        action="store_true",
        help="compare with the dual of the declared effective cone",
    )
    mov.set_defaults(handler=run_mov)

    dual = commands.add_parser("dual", parents=[output], help="convert between cone representations")
    given = dual.add_mutually_exclusive_group(required=True)
    given.add_argument("--gens", help='generators, e.g. "1,0;0,1"; prints the dual generators')
    given.add_argument("--ineqs", help="inequality normals; prints the generators of the cone they cut out")
    dual.add_argument("--dim", type=int, help="ambient dimension, needed for an empty vector list")
    dual.set_defaults(handler=run_dual)

    section = commands.add_parser("slice", parents=[output], help="cross-section polygon of a cone")
    section.add_argument("file")
    section.add_argument("--cone", choices=SECTION_CONES, default="mov")
    section.add_argument("--plane", required=True, help='plane normal n of x.n = 1, e.g. "1,1,1"')
    section.add_argument("--model", help="model on a pmc-flip sequence of the root (default: root)")
    section.set_defaults(handler=run_slice)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except MovConeError as error:
        if isinstance(error, ValidationFailed):
            _print_reports(error.reports)
        logger.debug("%s failed", args.command, exc_info=True)
        print(_colour(f"error: {error}", RED), file=sys.stderr)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
