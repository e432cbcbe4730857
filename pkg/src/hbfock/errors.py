"""Exception types raised by the evaluators."""


class HBError(Exception):
    pass


class PoleHit(HBError):
    """Evaluation point coincides with a pole of Theta (a zero of E)."""


class TailNotConvergent(HBError):
    """Declared or fitted tail exponents do not give a convergent product."""


class WindowExhausted(HBError):
    """No sublevel point found inside the largest allowed search window."""


class ResolutionExceeded(HBError):
    """Dyadic refinement went past the maximal depth."""


class OutOfCoveredRange(HBError):
    """Point lies outside the working range of a cover or node set."""


class RootBracketFailure(HBError):
    """A sign change was expected but could not be bracketed."""


class NonConvergent(HBError):
    """Quadrature failed its tolerance or decay monitor."""


class InvalidIndex(HBError):
    """Index or point does not belong to the model."""
