"""Exception hierarchy shared by all solver modules."""


class GammaEcError(Exception):
    """Base class for every error raised by this package."""


class PoleError(GammaEcError):
    """Evaluation requested too close to a pole."""


class DomainError(GammaEcError):
    """Argument outside the domain an operation is contracted for."""


class BranchPointError(GammaEcError):
    """Analytic continuation came too close to a branch point to proceed."""


class DegenerateDirectionError(GammaEcError):
    """Function is identically zero (or infinite) along the sampled ray."""


class NoRadiusFound(GammaEcError):
    """No radius below the sampling cap satisfies the perturbation bound."""


class TraceDivergence(GammaEcError):
    """Curve tracing failed to converge below the minimum step size."""


class GeometryError(GammaEcError):
    """A constructed contour violates closure/simplicity/orientation."""


class ZeroOnContour(GammaEcError):
    """The function passed to a winding computation vanishes on the contour."""


class NonConvergence(GammaEcError):
    """Adaptive refinement exceeded its sample budget."""


class NoCrossing(GammaEcError):
    """Sign-change bracketing failed within the allowed ray length."""


class SeparationFailure(GammaEcError):
    """A boundary separation inequality failed at a contour sample.

    The offending sample (and the inequality label) are carried in
    ``sample`` and ``label`` when available.
    """

    def __init__(self, message, label=None, sample=None):
        super().__init__(message)
        self.label = label
        self.sample = sample


class NewtonDivergence(GammaEcError):
    """Newton refinement stalled.

    ``diagnostic`` holds the certificate produced so far (region and
    winding) so callers can still report what was proven.
    """

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic


class SelectionFailure(GammaEcError):
    """No admissible starting tuple satisfies the selection conditions.

    ``condition`` names the first condition that could not be met.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition
