"""Exception types shared across the toolkit."""


class LevinsonError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LevinsonError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(LevinsonError, ValueError):
    """A potential descriptor or parameter set is malformed."""


class ConfigError(LevinsonError, ValueError):
    """Engine configuration is invalid (for example a non-positive step)."""


class NodeAtBoundaryError(LevinsonError, RuntimeError):
    """The wave function has a node at the matching radius; the requested
    quantity (a finite logarithmic derivative or its energy derivative) is
    undefined there."""


class TailModeError(LevinsonError, ValueError):
    """A cutoff-only operation was invoked on a tail potential, or a
    tail-only operation on a cutoff potential."""


class BranchTrackingError(LevinsonError, RuntimeError):
    """branch-tracking unresolved: the phase could not be continued in
    lambda with steps below pi/2 within the refinement budget."""


class SweepUnresolvedError(LevinsonError, RuntimeError):
    """sweep unresolved: zero crossings of the boundary log-derivative
    could not be isolated within the refinement budget."""


class LimitUnresolvedError(LevinsonError, RuntimeError):
    """limit unresolved: successive small-momentum phase evaluations
    disagree too much to extrapolate to zero momentum."""


class MatchingRadiusError(LevinsonError, RuntimeError):
    """increase matching radius: the extracted tail phase has not
    stabilized against doubling of the matching radius."""


class MethodDisagreementError(LevinsonError, RuntimeError):
    """Internal consistency failure: the matching count and the node count
    disagree.  This signals a numerical defect, not a physics outcome."""


class RefusalError(LevinsonError):
    """Verification is refused on physical grounds (not a numerical error)."""


class InfiniteSpectrumError(RefusalError, ValueError):
    """An inverse-square tail with b < -1/4 supports an infinite number of
    bound states; the counting relation cannot hold and the descriptor is
    rejected."""


class SlowDecayError(RefusalError, ValueError):
    """The potential tail was declared to decay slower than x^-2; the
    bound-state/phase-shift relation is violated for such tails and
    verification is refused."""


class CriticalTailError(RefusalError):
    """The zero-energy solution of a tail potential is critical
    (half-bound); the modified relation is established for non-critical
    cases only, so verification is refused."""
