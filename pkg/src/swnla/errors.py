"""Exception types shared across the package."""


class SwnlaError(Exception):
    """Base class for library errors."""


class DimensionError(SwnlaError, ValueError):
    """Shapes or dimensions do not agree."""


class InputError(SwnlaError, ValueError):
    """An argument violates a documented precondition."""


class ResourceError(SwnlaError):
    """A configuration would exceed the desk-scale resource guard."""
