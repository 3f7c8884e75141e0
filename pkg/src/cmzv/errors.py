"""Exception hierarchy for the cmzv package.

Every error raised by the library derives from :class:`CmzvError`, so
callers (and the CLI) can distinguish library failures from programming
errors with a single except clause.
"""


class CmzvError(Exception):
    """Base class for all cmzv errors."""


class UnknownConstant(CmzvError):
    """A symbol is not present in the constant registry."""


class PrecisionExhausted(CmzvError):
    """The requested accuracy could not be certified within resource caps."""


class OnBranchCut(CmzvError):
    """Principal-branch polylog requested on the cut [1, oo)."""


class DomainError(CmzvError):
    """Argument outside the mathematical domain of an operation."""


class DivergentWord(CmzvError):
    """A letter word whose evaluation diverges at the given endpoint."""


class InvalidWord(CmzvError):
    """A letter word that violates a structural rule (e.g. trailing zero
    where the series conversion requires a nonzero final letter)."""


class ShapeError(CmzvError):
    """A word does not have the shape required by a rewrite rule."""


class DivergentSpec(CmzvError):
    """A series specification that fails its convergence predicate."""


class AngleOutOfRange(CmzvError):
    """Parametric-family angle outside its open interval of validity."""


class QuadratureNonConvergent(CmzvError):
    """Quadrature levels exhausted without reaching the target accuracy."""


class SingularOnPath(CmzvError):
    """Integrand argument touches the polylog cut on the contour."""


class SchemaError(CmzvError):
    """Catalog file or record failed validation."""

    def __init__(self, message, record_id=None, field=None):
        self.record_id = record_id
        self.field = field
        where = ""
        if record_id is not None:
            where += f" [record {record_id}]"
        if field is not None:
            where += f" (field {field})"
        super().__init__(message + where)


class PrecisionTooLow(CmzvError):
    """Relation-detection headroom rule violated."""


class NoRelationFound(CmzvError):
    """PSLQ exhausted its search without a relation (informational)."""
