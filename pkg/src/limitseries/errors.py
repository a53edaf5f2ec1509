"""Exception types shared across the library."""


class LimitSeriesError(Exception):
    """Base class for all library errors."""


class MonotonicityViolation(LimitSeriesError):
    """Height data does not describe a staircase (heights increase somewhere)."""


class LengthMismatch(LimitSeriesError):
    """Componentwise operation applied to tuples of different lengths."""


class CapExceeded(LimitSeriesError):
    """A computation needs more x-degree or t-precision than the context tracks."""


class CapExhausted(LimitSeriesError):
    """No x-degree headroom left for a colon step."""


class InvalidTruncation(LimitSeriesError):
    """Truncation target exceeds the current t-precision."""


class InvalidSequence(LimitSeriesError):
    """Level sequence is not strictly decreasing (or not positive)."""


class DivisionWitnessFailure(LimitSeriesError):
    """A low-order coefficient expected to vanish during exact division did not."""


class PrecisionExceeded(LimitSeriesError):
    """t-adic elimination ran out of working precision; retry with a larger one."""


class PrimeTooSmall(LimitSeriesError):
    """The prime does not dominate the degrees in play."""


class DomainError(LimitSeriesError):
    """Arguments outside the stated parameter range of an operation."""


class IdentityFailure(LimitSeriesError):
    """An arithmetic identity that must hold for generated plans failed."""


class ResourceLimit(LimitSeriesError):
    """Requested computation exceeds desk-scale limits; pass force to override."""


class OracleResourceLimit(ResourceLimit):
    """Oracle-mode check would exceed desk-scale limits."""


class HypothesisFailed(LimitSeriesError):
    """Theorem application refused: a hypothesis check failed or was unresolved."""


class MultiplicitiesUnset(LimitSeriesError):
    """Diagram operation requires multiplicities but none are set."""


class NotUnloaded(LimitSeriesError):
    """Degree formula requested for a diagram that is not unloaded."""


class BoundaryWarning(UserWarning):
    """Some level n_j equals v*h for a column height h: the algebraic special
    fiber suppresses one more cell than the slice-count rule at that column."""
