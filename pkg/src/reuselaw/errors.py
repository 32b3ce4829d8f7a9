"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, InputParseError -> 2,
AnalysisPreconditionError -> 3.
"""


class ReuselawError(Exception):
    """Base class for all package errors."""


class ValidationError(ReuselawError, ValueError):
    """A value object failed its invariants."""


class ConfigError(ReuselawError):
    """Bad configuration: unknown key, out-of-range parameter, unusable spec."""


class InputParseError(ReuselawError):
    """An input file could not be parsed (ELF, text dump, corpus file)."""


class ElfParseError(InputParseError):
    """Malformed ELF input; carries the offending file offset when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at offset {offset:#x})"
        super().__init__(message)
        self.offset = offset


class AnalysisPreconditionError(ReuselawError):
    """An analysis was asked to run on data that does not meet its preconditions."""


class UndefinedFitError(AnalysisPreconditionError):
    """Too few qualifying points (or no variation) to define a fit."""
