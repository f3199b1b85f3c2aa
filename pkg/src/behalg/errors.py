"""Exception types shared across the package."""


class BehalgError(Exception):
    """Base class for all package-specific failures."""


class InvalidInputError(BehalgError):
    """Malformed, non-finite, or out-of-contract input."""


class InvalidRepresentationError(BehalgError):
    """A kernel/image representation violates its structural invariants."""


class InconsistentDataError(BehalgError):
    """Observed data cannot come from an exact LTI model of the assumed kind."""


class UncontrollableError(BehalgError):
    """An image representation was requested for an uncontrollable behavior."""


class AlgorithmFailureError(BehalgError):
    """An iterative window search exceeded its cap without meeting its target."""


class NumericFailureError(BehalgError):
    """A verification residual exceeded its tolerance."""


class InconsistentComplexityError(BehalgError):
    """Complexity bookkeeping produced impossible counts."""
