"""Shared exception types for the dqi_bench package."""


class ValidationError(ValueError):
    """An input value or file violates a structural invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; the message names the offending field."""


class CapacityError(RuntimeError):
    """A computation would exceed its configured enumeration budget."""
