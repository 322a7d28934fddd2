"""Exception hierarchy shared by all nodsis modules."""


class NodsisError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NodsisError, ValueError):
    """An argument lies outside the domain of a function."""


class DegenerateParameterError(NodsisError, ValueError):
    """A parameter value makes an expression undefined (e.g. division by k_p = 0)."""


class ThresholdUndefinedError(NodsisError, ValueError):
    """A bifurcation threshold cannot be evaluated for the given parameters."""


class RegimeError(NodsisError):
    """An analysis routine was called outside the parameter regime it supports."""


class AssumptionViolation(RegimeError):
    """The standing assumption (u0 < 1 and k_p + u0 > 1) does not hold."""


class NearBifurcationError(RegimeError):
    """The parameters sit on (or numerically at) a bifurcation value."""


class NotAnEquilibriumError(NodsisError):
    """The vector-field residual at a supposed fixed point is too large."""


class InvariantViolationError(NodsisError):
    """An integrated state left the trapping region by more than the clamping tolerance."""


class NotApplicableError(NodsisError):
    """A check does not apply to the given input."""


class NonConvergenceError(NodsisError):
    """A trajectory did not reach a fixed point within its horizon."""


class BranchLinkingError(NodsisError):
    """Equilibria at neighbouring sweep values could not be linked unambiguously."""


class ConfigError(NodsisError, ValueError):
    """An experiment configuration is malformed."""
