"""Shared exception taxonomy.

Every failure mode that callers are expected to handle gets a named class
here; plain ``ValueError`` is reserved for domain errors on scalar arguments
(probabilities outside (0,1), nonpositive degrees of freedom, and the like).
"""


class CopulaPathError(Exception):
    """Base class for all package-specific errors."""


class NotPositiveDefinite(CopulaPathError):
    """A matrix required to be symmetric positive-definite is not."""


class DegenerateColumn(CopulaPathError):
    """A data column is constant (zero sample standard deviation)."""


class TooFewObservations(CopulaPathError):
    """Sample too small for the requested statistic."""


class SingularDesign(CopulaPathError):
    """Regressor correlation matrix is singular (perfect collinearity)."""


class DegenerateConditional(CopulaPathError):
    """Implied conditional variance is negative beyond tolerance."""


class DegenerateResiduals(CopulaPathError):
    """All residuals are zero; the Gaussian log-likelihood is unbounded."""


class DimensionMismatch(CopulaPathError):
    """Vector/matrix dimensions do not agree."""


class LengthMismatch(CopulaPathError):
    """Paired vectors have different lengths."""


class SchemaMismatch(CopulaPathError):
    """Dataset columns do not match what a fitted model expects."""


class MissingColumn(CopulaPathError):
    """A requested column name is absent from the input file."""


class NonNumericCell(CopulaPathError):
    """A selected CSV cell could not be parsed as a finite number.

    Carries ``row`` (1-based, excluding the header) and ``column`` so the
    offending cell can be reported precisely.
    """

    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"non-numeric value {value!r} in column {column!r}, row {row}")


class EmptyFile(CopulaPathError):
    """Input CSV has no header or no data rows."""


class UnsupportedFormat(CopulaPathError):
    """Unknown report serialization format."""


class IoError(CopulaPathError):
    """Filesystem failure while reading or writing a report."""
