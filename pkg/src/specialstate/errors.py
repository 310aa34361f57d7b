"""Exception hierarchy shared by all modules.

Each class carries the process exit code the command-line front end uses
when the error escapes a run.
"""


class SpecialStateError(Exception):
    exit_code = 1
    kind = "error"

    def record(self) -> dict:
        """Machine-readable summary of the failure."""
        return {"kind": self.kind, "exit_code": self.exit_code, "message": str(self)}


class ValidationError(SpecialStateError, ValueError):
    """Inputs violate a documented precondition or invariant."""

    exit_code = 2
    kind = "validation"


class PreconditionError(ValidationError):
    kind = "precondition"


class SingularityError(ValidationError):
    """Observation point sits on (or numerically at) a current-carrying wire."""

    kind = "singularity"


class NumericError(SpecialStateError, ArithmeticError):
    exit_code = 3
    kind = "numeric"


class ResourceExhausted(SpecialStateError):
    """A sampling budget ran out before the requested output was produced."""

    exit_code = 4
    kind = "resource"

    def __init__(self, message: str, *, acceptance_rate: float | None = None):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate

    def record(self) -> dict:
        rec = super().record()
        rec["acceptance_rate"] = self.acceptance_rate
        return rec
