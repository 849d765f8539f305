class LameSpecError(Exception):
    """Base class for every error raised by lamespec."""


class DomainError(LameSpecError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class InadmissibleParameters(DomainError):
    """Lamé coefficients violate mu > 0, lambda + mu > 0 or -1 < nu < 1/2."""


class MeshError(DomainError):
    """A mesh is degenerate, inverted or not a manifold triangulation."""


class NumericalFailure(LameSpecError):
    """A numerical procedure could not produce a trustworthy result."""


class InvalidBracket(NumericalFailure, ValueError):
    """The endpoints handed to a bracketed root finder have the same sign."""


class RootScanFailure(NumericalFailure):
    """A sign-change scan found no bracket where one must exist."""


class RegimeMismatch(NumericalFailure):
    """The requested quantity is not defined in the regime of the given parameters."""


class DegenerateCoefficient(NumericalFailure):
    """A denominator or bracketed factor vanished to working precision."""


class DegenerateGeometry(NumericalFailure):
    """A closed-form construction collapsed (parallel normals, zero area)."""


class FactorizationError(NumericalFailure):
    """Sparse factorization of the stiffness matrix failed."""


class ConvergenceError(NumericalFailure):
    """An iterative solver ran out of iterations."""
