"""Exception hierarchy shared by all monotrack modules."""


class MonotrackError(Exception):
    """Base class for all library errors."""


class DegenerateInput(MonotrackError):
    """An argument violates a documented precondition (zero polynomial,
    improper transfer function, invalid order request, ...)."""


class ConvergenceFailure(MonotrackError):
    """An iterative numerical procedure stalled; the message reports the
    offending interval or iterate."""


class InfeasiblePlant(MonotrackError):
    """Monotonic tracking is impossible for this plant at any controller
    order (it has a real non-negative zero, or no usable gain)."""


class InfeasibleOrder(MonotrackError):
    """Monotonic tracking is impossible at the requested closed-loop order
    but becomes feasible at some larger order."""


class InfeasibleDecay(MonotrackError):
    """The requested decay rate exceeds the fastest rate compatible with a
    monotonic response at this order."""


class InfeasibleAtAlphaZero(MonotrackError):
    """A decay-rate search was requested for a configuration that is
    already infeasible with no decay constraint."""


class RankDeficient(MonotrackError):
    """The pole-placement system is numerically singular (typically a
    non-coprime plant)."""


class ResidualTooLarge(MonotrackError):
    """A linear solve succeeded but its relative residual exceeds the
    trust threshold."""
