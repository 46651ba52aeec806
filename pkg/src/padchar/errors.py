"""Exception hierarchy shared by the library and the CLI exit codes."""


class PadcharError(Exception):
    """Base class for all library errors."""


class ValidationError(PadcharError):
    """Input data violates a structural invariant (CLI exit code 1)."""


class MismatchError(PadcharError):
    """Two independent computations disagree (CLI exit code 2)."""
