class HyplanException(Exception):
    """Base class for every error raised by hyplan.

    ``details`` carries machine-readable context (region, hour, row name ...)
    that the command line writes into ``error.json``.
    """

    def __init__(self, message: str = "", details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ScenarioValidationError(HyplanException):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        message = "Scenario validation failed:\n" + "\n".join(f"\t{error}" for error in self.errors)
        super().__init__(message, {"errors": self.errors})


class PrepInputError(HyplanException):
    pass


class InfeasibleScenarioError(HyplanException):
    pass


class SolverError(HyplanException):
    pass


class SolverSizeError(SolverError):
    pass


class FingerprintMismatchError(HyplanException):
    pass


class ManifestMismatchError(FingerprintMismatchError):
    pass


class SolutionImportError(HyplanException):
    pass


class PipelineImbalanceError(HyplanException):
    pass


class ModelFormatError(HyplanException):
    pass
