"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class StratImpactError(Exception):
    """Base class for all errors raised by this package."""


class DataError(StratImpactError, ValueError):
    """Bad input data: missing file/column, unparseable cell, shape mismatch."""


class NumericError(StratImpactError, ArithmeticError):
    """A computation has no defined answer (no signal, rank deficiency, ...)."""
