"""
Trispin: Domain Errors

Each error class knows the HTTP status the service answers with and the
exit code the CLI terminates with.
"""

from models import ExitCode


class TrispinError(Exception):
    status_code: int = 400
    exit_code: int = ExitCode.USAGE


class SpinIndexError(TrispinError, IndexError):
    status_code = 422
    exit_code = ExitCode.USAGE


class DimensionMismatchError(TrispinError, ValueError):
    status_code = 422
    exit_code = ExitCode.IO_FORMAT


class ContractViolationError(TrispinError, ValueError):
    status_code = 422
    exit_code = ExitCode.IO_FORMAT


class AngleRangeError(TrispinError, ValueError):
    status_code = 422
    exit_code = ExitCode.USAGE


class UnsupportedPatternError(TrispinError, ValueError):
    status_code = 422
    exit_code = ExitCode.USAGE


class SequenceFormatError(TrispinError, ValueError):
    status_code = 400
    exit_code = ExitCode.IO_FORMAT


class ConstructionError(TrispinError, RuntimeError):
    """A builder's construction-time unitary check failed."""
    status_code = 500
    exit_code = ExitCode.VERIFICATION_FAILED
