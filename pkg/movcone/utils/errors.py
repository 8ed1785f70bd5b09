class MovConeError(Exception):
    """Base class of every error raised by movcone.

    ``exit_code`` is the process status the command line front end uses
    when the error escapes a subcommand.
    """

    exit_code = 4


class ParseError(MovConeError):
    exit_code = 2


class SchemaError(MovConeError):
    exit_code = 2

    def __init__(self, violations: list[str]):
        self.violations = violations[:10]
        super().__init__("; ".join(self.violations))


class ValidationFailed(MovConeError):
    exit_code = 3

    def __init__(self, reports):
        self.reports = reports
        subjects = ", ".join(report.subject for report in reports)
        super().__init__(f"validation failed for {subjects}")


class CycleDetected(MovConeError):
    def __init__(self, chain: list[str]):
        self.chain = chain
        super().__init__("flip cycle: " + " -> ".join(chain))


class MissingModel(MovConeError):
    def __init__(self, model_id: str):
        self.model_id = model_id
        super().__init__(f"model '{model_id}' is not declared in the graph")


class UnknownRay(MovConeError):
    pass


class NonPointedResult(MovConeError):
    pass


class DimensionMismatch(MovConeError):
    pass


class SmallRayPresent(MovConeError):
    pass


class NotFano(MovConeError):
    pass


class MissingEffData(MovConeError):
    pass


class NotSliceable(MovConeError):
    pass


class SingularMatrix(MovConeError):
    pass
