import logging
import secrets
from pathlib import Path
from typing import Literal

from fastapi import Depends, FastAPI, HTTPException, Query, Request, status
from fastapi.responses import HTMLResponse
from fastapi.security import HTTPBasic, HTTPBasicCredentials
from fastapi.templating import Jinja2Templates
from pydantic import BaseModel, ConfigDict
from starlette.staticfiles import StaticFiles

from movcone.utils.cones import cone_from_generators, cone_from_inequalities, dual_cone
from movcone.utils.corpus import corpus_path
from movcone.utils.documents import (
    ConeDocument,
    SectionDocument,
    cone_document,
    format_class,
    format_vector,
    load_graph,
    parse_vector,
)
from movcone.utils.equations import EquationSet, crosscheck_bdpp, eq_for_variety, moving_cone
from movcone.utils.errors import MovConeError, ValidationFailed
from movcone.utils.flips import FlipSequence, enumerate_pmc_sequences, verify_graph
from movcone.utils.models import ModelGraph, ValidationReport, Vector, small_rays
from movcone.utils.sections import slice_graph

logger = logging.getLogger(__name__)

security = HTTPBasic(auto_error=False)


class DualRequest(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    generators: list[Vector] | None = None
    inequalities: list[Vector] | None = None
    dim: int | None = None


def _failure(action: str, error: Exception) -> HTTPException:
    if isinstance(error, MovConeError):
        logger.warning("%s failed: %s", action, error)
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(error))
    logger.exception("An error occurred while %s", action)
    return HTTPException(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        detail=f"An error occurred while {action}.",
    )


class MovConeDashboard(FastAPI):
    def __init__(
        self,
        graph_path: str | Path | None = None,
        prefix: str = "/movcone",
        username: str | None = None,
        password: str | None = None,
        *args,
        **kwargs,
    ):
        super().__init__(root_path=prefix, *args, **kwargs)

        package_directory = Path(__file__).resolve().parent
        static_directory = package_directory / "static"

        self.mount("/static", StaticFiles(directory=static_directory), name="static")

        templates_directory = package_directory / "templates"
        self.templates = Jinja2Templates(directory=templates_directory)
        self.graph_path = Path(graph_path) if graph_path else corpus_path("fourfold_example")
        self.graph: ModelGraph = load_graph(self.graph_path)
        self.reports: list[ValidationReport] = verify_graph(self.graph)

        self.username = username
        self.password = password

        self.movcone_version = "0.1.0"

        async def verify_credentials(credentials: HTTPBasicCredentials | None = Depends(security)):
            if self.username is None and self.password is None:
                return None
            correct_username = credentials is not None and secrets.compare_digest(
                credentials.username, self.username or ""
            )
            correct_password = credentials is not None and secrets.compare_digest(
                credentials.password, self.password or ""
            )
            if not (correct_username and correct_password):
                raise HTTPException(
                    status_code=status.HTTP_401_UNAUTHORIZED,
                    detail="Incorrect username or password",
                    headers={"WWW-Authenticate": "Basic"},
                )
            return credentials.username

        guarded = [Depends(verify_credentials)]

        @self.get("/", response_class=HTMLResponse, dependencies=guarded)
        async def get_report(request: Request):
            try:
                return self.templates.TemplateResponse(
                    request,
                    "report.html",
                    {
                        "prefix": prefix,
                        "movcone_version": self.movcone_version,
                        "graph_path": self.graph_path.name,
                        **self.report_context(),
                    },
                )
            except Exception as error:
                raise _failure("rendering the report page", error)

        @self.get("/validate/json", response_model=list[ValidationReport], dependencies=guarded)
        async def read_validation():
            try:
                return self.reports
            except Exception as error:
                raise _failure("validating the model graph", error)

        @self.get("/sequences/json", response_model=list[FlipSequence], dependencies=guarded)
        async def read_sequences(ray: str | None = Query(None)):
            try:
                return enumerate_pmc_sequences(self.graph, self.graph.root, ray)
            except Exception as error:
                raise _failure("enumerating pmc-flip sequences", error)

        @self.get("/eq/json", response_model=EquationSet, dependencies=guarded)
        async def read_equations():
            try:
                return eq_for_variety(self.verified_graph())
            except Exception as error:
                raise _failure("assembling Eq(X)", error)

        @self.get("/mov/json", response_model=ConeDocument, dependencies=guarded)
        async def read_moving_cone():
            try:
                return cone_document(moving_cone(self.verified_graph()))
            except Exception as error:
                raise _failure("computing the moving cone", error)

        @self.get("/slice/json", response_model=SectionDocument, dependencies=guarded)
        async def read_slice(
            cone: Literal["mor", "mov", "nef"] = Query("mov"),
            plane: str = Query("1,1,1"),
            model: str | None = Query(None),
        ):
            try:
                return slice_graph(self.verified_graph(), cone, parse_vector(plane), model)
            except Exception as error:
                raise _failure("slicing the cone", error)

        @self.post("/dual/json", response_model=ConeDocument, dependencies=guarded)
        async def compute_dual(body: DualRequest):
            try:
                if body.generators is not None:
                    result = dual_cone(cone_from_generators(body.generators, body.dim))
                else:
                    result = cone_from_inequalities(body.inequalities or [], body.dim)
                return cone_document(result)
            except Exception as error:
                raise _failure("converting the cone", error)

    def report_context(self) -> dict:
        """Everything the report page shows; failures become messages on the page."""
        graph = self.graph
        root = graph.root_model
        labels = root.space.divisor_basis_labels
        reports = self.reports
        context = {
            "root": root.id,
            "models": graph.models,
            "notes": graph.notes,
            "reports": reports,
            "valid": all(report.ok for report in reports),
            "sequences": [],
            "equations": [],
            "mov_rays": [],
            "bdpp": None,
            "error": None,
        }
        try:
            for ray in small_rays(root):
                context["sequences"].extend(
                    sequence.describe() for sequence in enumerate_pmc_sequences(graph, root.id, ray.label)
                )
            if context["valid"]:
                context["equations"] = [
                    {
                        "vector": format_vector(known.vector),
                        "label": format_class(known.vector, labels),
                        "provenance": known.provenance.describe(),
                    }
                    for known in eq_for_variety(graph).classes
                ]
                context["mov_rays"] = [format_vector(ray) for ray in moving_cone(graph).rays]
                if root.declared_eff_generators is not None:
                    context["bdpp"] = crosscheck_bdpp(graph)
        except MovConeError as error:
            context["error"] = str(error)
        return context

    def verified_graph(self) -> ModelGraph:
        failed = [report for report in self.reports if not report.ok]
        if failed:
            raise ValidationFailed(failed)
        return self.graph
