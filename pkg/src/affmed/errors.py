class AffmedError(Exception):
    """Base class for library errors."""


class DimensionMismatch(AffmedError, ValueError):
    pass


class SingularCovariance(AffmedError, ValueError):
    pass


class InfeasibleDegenerate(AffmedError, RuntimeError):
    """Zero-width slab constraints that no hull point can satisfy."""
