"""Exception hierarchy."""


class SdfMcrtError(Exception):
    """Base class for all package errors."""

    category = "error"


class InvalidParameterError(SdfMcrtError, ValueError):
    """A shape or operator was given a parameter outside its domain."""

    category = "validation"


class DegenerateGradientError(SdfMcrtError, ArithmeticError):
    """Numerical SDF gradient vanished (singular point of the field)."""

    category = "geometry"


class ConfigError(SdfMcrtError, ValueError):
    category = "config"


class SceneParseError(SdfMcrtError):
    """Scene document is not well-formed."""

    category = "parse"


class SceneValidationError(SdfMcrtError, ValueError):
    """Scene document is well-formed but violates a constraint."""

    category = "validation"


class GridFormatError(SdfMcrtError):
    category = "format"
