"""
Exception hierarchy. Each class carries the CLI exit code it maps to.
"""


class LabError(Exception):
    """Base class for all lie-eigenlab errors"""
    exit_code = 3


class InvalidSpecError(LabError):
    """Unsupported group family or rank"""
    exit_code = 2


class SpecMismatchError(LabError):
    """Operands belong to different groups"""
    exit_code = 2


class PreconditionError(LabError):
    """Generator data violates a constructor precondition"""
    exit_code = 2


class NotOrthogonalError(PreconditionError):
    """Cross pairs of two families fail the kappa probe"""


class DegreeMismatchError(PreconditionError):
    """Polynomials of a morphism have different degrees or variable counts"""


class DependenceError(PreconditionError):
    """Polynomials of a morphism are linearly dependent"""


class ConfigError(LabError):
    """Invalid run configuration"""
    exit_code = 2


class UsageError(LabError):
    """Unknown command-line name (family label, criterion, format)"""
    exit_code = 2


class NumericalError(LabError):
    """Internal numerical failure"""
    exit_code = 3


class RetractionError(NumericalError):
    """Matrix too far from the group, or singular"""


class NonConvergenceError(NumericalError):
    """Newton projection exceeded its iteration budget"""


class SingularityError(NumericalError):
    """Constraint differential is rank-deficient"""

    # Surfaced to the user as a precondition failure (e.g. H = I).
    exit_code = 2


class SamplingError(NumericalError):
    """Point sampling produced too few points"""
