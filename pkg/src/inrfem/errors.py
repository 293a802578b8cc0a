"""Exception types shared across the package."""


class InrFemError(Exception):
    """Base class for all package-specific errors."""


class DegenerateGradient(InrFemError):
    """Gradient norm below threshold (medial axis or untrained region)."""


class AmbiguousSign(InrFemError):
    """Ray-parity sign test failed after perturbation retries."""


class DegenerateBounds(InrFemError):
    """Bounding box has zero extent along some axis."""


class FormatError(InrFemError):
    """Malformed INRW / OBJ / STL input."""


class DimensionMismatch(InrFemError):
    """Inconsistent array or spatial dimensions."""


class EmptyDomain(InrFemError):
    """No octree leaf intersects the geometry."""


class EmptySoup(InrFemError):
    """Triangle soup has no usable triangles."""


class InvalidMaterial(InrFemError):
    """Material parameters outside the admissible range."""


class UnknownCase(InrFemError):
    """Requested manufactured-solution case is not registered."""


class MissingDistanceVector(InrFemError):
    """Surrogate face used in assembly before distance vectors were attached."""


class Breakdown(InrFemError):
    """Krylov iteration hit a zero inner product."""


class NotConverged(InrFemError):
    """Iterative solve exhausted its iteration budget."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ZeroDiagonal(InrFemError):
    """Jacobi preconditioning requested on a matrix with a zero diagonal entry."""


class NoPointsInBand(InrFemError):
    """NMSE band contains no grid points."""
