"""Exception types shared across the package."""


class TdxError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(TdxError):
    """A relation, attribute, or instance does not match the expected schema."""


class InvalidHorizonError(TdxError):
    """A horizon is missing, non-finite, or below an endpoint it must cover."""


class PreconditionError(TdxError):
    """An operation was invoked on input that violates its contract."""


class KeyNullViolation(TdxError):
    """A temporal-key position holds an annotated null; key attributes must be null-free."""


class ParseError(TdxError):
    """Mapping text could not be parsed; carries the source location."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message
