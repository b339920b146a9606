"""Exception hierarchy for the toolkit.

Every error raised by this package derives from ToolkitError so callers
can catch one type. The CLI maps subtrees to stable exit codes.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(ToolkitError):
    """A physical parameter is missing, nonpositive, or not finite."""


class AmbiguousParameterError(InvalidParameterError):
    """Mutually exclusive parameters were both supplied."""


class RegimeError(ToolkitError):
    """Operation invoked outside its regime of validity and not forced."""


class StabilityError(RegimeError):
    """Linearized dynamics unstable: |G| >= omega_m / 2."""


class ResolutionError(ToolkitError):
    """Time step too coarse for the fastest scale in the problem."""


class CoverageError(ToolkitError):
    """Tabulated spectrum does not cover the requested frequency band."""


class FitError(ToolkitError):
    """A model fit failed or its residuals exceed the advertised threshold."""


class _LineError(ToolkitError):
    """Error tied to a line of a text input; carries the line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(_LineError):
    """Config file could not be parsed or is missing required keys."""


class DataFormatError(_LineError):
    """Input data file is malformed or violates a format invariant."""
