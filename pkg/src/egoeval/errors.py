"""Exception types raised across the package."""


class EgoEvalError(Exception):
    """Base class for all package errors."""


class DegenerateInput(EgoEvalError, ValueError):
    pass


class NonConvexInput(EgoEvalError, ValueError):
    pass


class ParseError(EgoEvalError):
    """Malformed scene record. ``line`` is 1-based, or None for file-level problems."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class ValidationError(EgoEvalError, ValueError):
    """An invariant breach; ``field`` is a dotted path to the offending value."""

    def __init__(self, message, field=None):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(prefix + message)


class InvalidConfig(EgoEvalError, ValueError):
    pass


class MissingFrame(EgoEvalError, LookupError):
    pass


class EmptyInput(EgoEvalError, ValueError):
    pass


class InsufficientPoints(EgoEvalError, ValueError):
    pass


class DegenerateAtCenter(EgoEvalError, ValueError):
    pass


class ZeroDistanceWarning(UserWarning):
    """A shape center coincided with the ego center; its weight was capped."""
