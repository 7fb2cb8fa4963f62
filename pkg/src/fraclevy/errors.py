"""Exception hierarchy shared by every module of the package."""


class FracLevyError(Exception):
    """Base class for all numerical failures raised by fraclevy."""


class DomainError(FracLevyError, ValueError):
    """Argument or parameter outside the supported domain."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class SeriesConvergenceError(FracLevyError, ArithmeticError):
    """A power series did not meet its tolerance within the term cap."""


class StripError(DomainError):
    """A Mellin-Barnes contour does not lie in the strip of analyticity."""


class ContourError(FracLevyError, ArithmeticError):
    """Vertical-line quadrature failed (non-decaying integrand, tail too large)."""


class ResidueError(FracLevyError):
    """Residue summation is ambiguous for the given integrand."""


class StructureError(FracLevyError, ValueError):
    """Levy structure requested but absent from the integrand."""


class QuadratureError(FracLevyError, ArithmeticError):
    """Numeric quadrature failed to converge."""


class UncataloguedForcingError(FracLevyError, ValueError):
    """The forcing term has no closed-form entry in the solution catalog."""


class SingularForcingError(FracLevyError, ValueError):
    """A sampled function is non-finite or blows up non-integrably."""


class DivergenceError(FracLevyError, ArithmeticError):
    """An integral or series diverges for the requested parameters."""
