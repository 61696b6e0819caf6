"""Exception types shared across the package."""


class MimoOutageError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(MimoOutageError):
    """A spectrum or matrix has the wrong length for the antenna counts."""


class LengthMismatch(DimensionMismatch):
    """Two vectors that must be compared elementwise differ in length."""


class NonDistinctSpectrum(MimoOutageError):
    """Correlation eigenvalues repeat without being the identity spectrum."""


class TraceViolation(MimoOutageError):
    """A correlation spectrum does not sum to its antenna count."""


class PoleAtNonpositiveInteger(MimoOutageError):
    """log-gamma requested at 0, -1, -2, ... where Gamma has a pole."""


class InvalidDegenerateParameters(MimoOutageError):
    """The degenerate (A=0) kernel factor requires alpha=-1 and phi=1."""


class QuadratureNonConvergence(MimoOutageError):
    """A quadrature refinement hit its node cap before reaching tolerance."""


class NonConvergence(MimoOutageError):
    """Contour integration hit its truncation cap before reaching tolerance."""


class EmptyPoleSet(MimoOutageError):
    """A residue kernel was requested with no poles to the left of the contour."""


class PermutationBudgetExceeded(MimoOutageError):
    """Antenna counts imply a permutation sum beyond the supported size."""
