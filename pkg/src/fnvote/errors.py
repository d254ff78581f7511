"""Exception hierarchy shared by all fnvote modules.

Everything raised deliberately by the library derives from FnvoteError so
the CLI can map expected failures to exit code 1 and keep 2 for genuine bugs.
"""


class FnvoteError(Exception):
    """Base class for all errors raised by fnvote."""


class SpecError(FnvoteError):
    """Invalid basis or grid specification (bad K, degree, domain, knots)."""


class DomainError(FnvoteError):
    """Evaluation point or grid lies outside a basis domain."""


class DataError(FnvoteError):
    """Dataset content is unusable (empty, non-finite, degenerate labels)."""


class ParseError(DataError):
    """Malformed input file; the message names the offending line."""


class LabelError(DataError):
    """Labels violate a contract (non-binary where binary is required, etc.)."""


class ShapeError(FnvoteError):
    """Array dimensions do not line up."""


class ParameterError(FnvoteError):
    """A hyperparameter is out of its valid range."""
