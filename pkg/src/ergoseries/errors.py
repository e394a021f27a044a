"""Exception types shared across the library."""


class ErgoSeriesError(Exception):
    """Base class for library-specific failures."""


class SchemaError(ErgoSeriesError):
    """A configuration or input table violates a declared invariant."""


class NumericalError(ErgoSeriesError):
    """An iterative computation failed to meet its stated tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class PrecisionBudgetError(ErgoSeriesError):
    """A requested horizon exceeds the declared orbit-precision budget."""
