"""Exception hierarchy shared by the library and the CLI.

Every error carries a stable machine ``code`` and a human ``detail``; the CLI
prints both on a single line and exits with status 1.
"""

from typing import Optional


class SidDmdError(Exception):
    """Base class for all library errors"""

    code = "error"

    def __init__(self, detail: str, code: Optional[str] = None):
        super().__init__(detail)
        self.detail = detail
        if code is not None:
            self.code = code

    def to_dict(self) -> dict:
        return {"error": self.code, "detail": self.detail}


class InvalidInputError(SidDmdError):
    code = "invalid_input"


class DimensionMismatchError(InvalidInputError):
    code = "dimension_mismatch"


class InsufficientDataError(InvalidInputError):
    code = "insufficient_data"

    def __init__(self, detail: str, required: int, available: int):
        super().__init__(f"{detail} (required at least {required}, got {available})")
        self.required = required
        self.available = available


class InfeasibleError(SidDmdError):
    code = "infeasible"


class DefectiveMatrixError(SidDmdError):
    code = "defective_matrix"


class IllConditionedError(SidDmdError):
    code = "ill_conditioned"


class ObservabilityError(SidDmdError):
    code = "observability"


class CompletionError(SidDmdError):
    code = "completion_impossible"


class NumericalConsistencyError(SidDmdError):
    code = "consistency"


class SchemaVersionError(SidDmdError):
    code = "schema_version"


class IngestError(SidDmdError):
    code = "ingest"
