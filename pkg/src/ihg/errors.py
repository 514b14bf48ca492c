"""Exception hierarchy shared by every evaluator in the package."""


class IHGError(Exception):
    """Base class for all evaluation errors."""


class PoleError(IHGError):
    """Argument sits on (or within eps_int of) a pole."""


class ZeroBaseError(IHGError):
    """Power of zero with non-positive real exponent."""


class BoundaryError(IHGError):
    """Point lies on a branch cut or a domain boundary."""


class EndpointError(IHGError):
    """Integration endpoints violate 0 <= a < b."""


class NonGenericParameters(IHGError):
    """An exponent combination is (numerically) an integer where the series needs it not to be."""


class OutsideConvergenceRegion(IHGError):
    """Point is not inside the open convergence region (with margin)."""


class NotConverged(IHGError):
    """Series hit its term cap before the tail bound reached the tolerance."""


class QuadratureNotConverged(IHGError):
    pass


class BranchPointOnContour(IHGError):
    pass


class ContourCollision(IHGError):
    """Moving branch point ran into the contour, an endpoint or another singularity."""


class DerivativeOrderTooHigh(IHGError):
    pass


class NumericBreakdown(IHGError):
    pass


class RankError(IHGError):
    """Columns of A do not span Z^d."""


class ToricMismatch(IHGError):
    pass


class UnknownShift(IHGError):
    pass


class EmptyOverlap(IHGError):
    pass
