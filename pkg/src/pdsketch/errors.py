"""Exception types shared across the package."""


class PDSketchError(Exception):
    """Base class for all pdsketch errors."""


class ParseError(PDSketchError):
    """Malformed diagram or sketch text; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(PDSketchError):
    """Input violates a documented invariant (bad coordinates, bad masses, ...)."""


class UnsupportedInputError(PDSketchError):
    """Well-formed input outside the supported domain (e.g. infinite coordinates)."""


class PreconditionError(PDSketchError):
    """An operation was called without the structures its contract requires."""


class PrecisionUnreachableError(PDSketchError):
    """A partial sketch cannot serve the requested precision."""
