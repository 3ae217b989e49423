"""Exception types raised across the package."""


class LowerGapError(Exception):
    """Base class for every error raised by lowergap."""


class InvalidPermutation(LowerGapError, ValueError):
    pass


class ClosureExceedsLimit(LowerGapError):
    pass


class UnsupportedParameter(LowerGapError, ValueError):
    pass


class NotASubgroup(LowerGapError):
    """A candidate element set failed identity, closure or inverse checks.

    ``failed_hypotheses`` names the hypotheses of the extraction argument that
    were not met when the candidate was produced (empty when all were met).
    """

    def __init__(self, message, failed_hypotheses=()):
        super().__init__(message)
        self.failed_hypotheses = tuple(failed_hypotheses)


class WrongIndex(NotASubgroup):
    pass


class NotUndirected(LowerGapError):
    pass


class NotInvariant(LowerGapError):
    pass


class NotTransitive(LowerGapError):
    pass


class NotSymmetric(LowerGapError):
    pass


class ConditioningFailed(LowerGapError):
    pass


class DegenerateEigenpair(LowerGapError):
    pass


class TooLargeForExact(LowerGapError):
    pass


class HypothesisNotMet(LowerGapError):
    pass


class InstanceFormatError(LowerGapError, ValueError):
    """Malformed instance or family-spec file; ``field`` names the culprit."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class InvalidInstance(LowerGapError):
    """A constructed instance failed validation (directed, disconnected, bipartite, ...)."""

    def __init__(self, message, reasons=()):
        super().__init__(message)
        self.reasons = tuple(reasons)
