"""Exception hierarchy shared by all vortexlab modules."""


class VortexLabError(Exception):
    """Base class for every error raised by the library."""


class InvalidParameterError(VortexLabError, ValueError):
    """A scalar or point argument lies outside its admissible range."""


class InvalidConfigError(VortexLabError, ValueError):
    """A vortex configuration or run configuration is malformed."""


class DegenerateLoopError(VortexLabError):
    """A loop sample has zero modulus, so no winding number exists."""


class UndersampledError(VortexLabError):
    """Sampling is too coarse for unambiguous phase tracking."""


class TopologicalObstructionError(VortexLabError):
    """A phase lift was requested for a loop of nonzero degree."""


class DegreeMismatchError(VortexLabError, ValueError):
    """Zero counts or vortex degrees do not add up to the boundary degree."""


class SingularityError(VortexLabError, ValueError):
    """Evaluation was requested at a logarithmic singularity or vortex."""


class DomainError(VortexLabError, ValueError):
    """An argument falls outside the domain of a closed-form expression."""


class NumericError(VortexLabError, FloatingPointError):
    """Non-finite values appeared in a field or energy evaluation."""


class StalledError(VortexLabError):
    """The line search could not find a decrease along a descent direction."""


class ResolutionError(VortexLabError):
    """The mesh cannot resolve the requested geometric construction."""


class InvalidProbeError(VortexLabError, ValueError):
    """A probe region overlaps a vortex exclusion margin."""


class UndefinedRatioError(VortexLabError, ZeroDivisionError):
    """A ratio with a vanishing denominator was requested."""


class OptimizerFailureError(VortexLabError):
    """Every start of a multistart optimization failed to converge.

    The best iterate seen across all starts is kept on ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
