"""
File which contains definitions of custom exception patterns
Every exception carries a stable machine-readable code and the process exit code
the command line surface should terminate with.
"""

from src.helpers.consts import EXIT_HYPOTHESIS, EXIT_IO, EXIT_NUMERICAL


class QuadSemiError(Exception):
    """
    Base class for every error raised by the analysis pipeline
    """

    code = "QuadSemiError"
    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, **context) -> None:
        super().__init__(message)
        self.context = context

    def to_dict(self) -> dict:
        """
        Machine-readable form used by the CLI when refusing a problem
        """
        return {"code": self.code, "message": str(self), "context": self.context}


class MissingConfigurationError(QuadSemiError):
    """
    Defines an exception class for use when the loaded configuration file contains missing data
    """

    code = "MissingConfiguration"
    exit_code = EXIT_IO


class ParseError(QuadSemiError):
    """
    Problem file is not valid JSON or a field has the wrong shape
    """

    code = "ParseError"
    exit_code = EXIT_IO


class IoError(QuadSemiError):
    """
    Output could not be written
    """

    code = "IoError"
    exit_code = EXIT_IO


# Hypothesis failures


class DimensionMismatchError(QuadSemiError):
    """
    Coefficient matrix is not square of size 2n
    """

    code = "DimensionMismatch"
    exit_code = EXIT_HYPOTHESIS


class ReNotPSDError(QuadSemiError):
    """
    The real part of the symbol takes negative values
    """

    code = "ReNotPSD"
    exit_code = EXIT_HYPOTHESIS


class SingularSpaceNontrivialError(QuadSemiError):
    """
    The singular space is not {0}; propagation modules refuse to run
    """

    code = "SingularSpaceNontrivial"
    exit_code = EXIT_HYPOTHESIS

    def __init__(self, message: str, basis=None, **context) -> None:
        super().__init__(message, **context)
        self.basis = basis


class NonPositiveGammaError(QuadSemiError):
    """
    Real part of the ground state energy is not positive
    """

    code = "NonPositiveGamma"
    exit_code = EXIT_HYPOTHESIS


class PQOrderingError(QuadSemiError):
    """
    Requested exponents violate 1 <= p <= q <= inf
    """

    code = "PQOrdering"
    exit_code = EXIT_HYPOTHESIS


class UnsupportedDimensionError(QuadSemiError):
    """
    Discretization requested for a dimension the oracle does not handle
    """

    code = "UnsupportedDimension"
    exit_code = EXIT_HYPOTHESIS


class UnsupportedPairError(QuadSemiError):
    """
    Operator norm requested at an interior (p, q) pair
    """

    code = "UnsupportedPair"
    exit_code = EXIT_HYPOTHESIS


class InsufficientSamplesError(QuadSemiError):
    """
    Too few curve samples inside the fitting window
    """

    code = "InsufficientSamples"
    exit_code = EXIT_HYPOTHESIS


# Numerical failures


class RealEigenvalueDetectedError(QuadSemiError):
    """
    Hamilton matrix has an eigenvalue on (or numerically on) the real axis
    """

    code = "RealEigenvalueDetected"


class CutoffTooLargeError(QuadSemiError):
    """
    Spectrum enumeration would exceed the configured point limit
    """

    code = "CutoffTooLarge"


class DegeneratePairingError(QuadSemiError):
    """
    The symplectic pairing between the stable planes is singular
    """

    code = "DegeneratePairing"


class NormalFormResidualError(QuadSemiError):
    """
    Transformed symbol keeps zz or zeta-zeta blocks above tolerance
    """

    code = "NormalFormResidual"


class FiberTangencyError(QuadSemiError):
    """
    Canonical map has a singular fiber block, no generating phase exists
    """

    code = "FiberTangency"


class ConvexityFailureError(QuadSemiError):
    """
    Weight is not strictly convex
    """

    code = "ConvexityFailure"


class LeviFailureError(QuadSemiError):
    """
    Levi matrix of the weight is not Hermitian positive definite
    """

    code = "LeviFailure"


class NegativeAlphaError(QuadSemiError):
    """
    Weight difference R_t has a negative direction
    """

    code = "NegativeAlpha"


class IntegrabilityFailureError(QuadSemiError):
    """
    Gaussian integrand does not decay in every direction
    """

    code = "IntegrabilityFailure"


class GraphFailureError(QuadSemiError):
    """
    Stable outgoing plane is not a graph over the base
    """

    code = "GraphFailure"


class ExpFailureError(QuadSemiError):
    """
    Matrix exponential produced non-finite entries
    """

    code = "ExpFailure"
