"""Exception hierarchy shared by all modules."""


class ReebMecError(Exception):
    """Base class for every error raised by reebmec."""


class NotSymplecticError(ReebMecError, ValueError):
    pass


class DimensionMismatchError(ReebMecError, ValueError):
    pass


class PolarConvergenceError(ReebMecError, ArithmeticError):
    pass


class SamplingDensityError(ReebMecError, ValueError):
    """A path is too coarsely sampled for an unambiguous angle lift."""


class DegenerateEndpointError(ReebMecError, ValueError):
    """det(Psi(T) - I) vanishes; the Conley-Zehnder index is undefined.

    Use the Robbin-Salamon index instead.
    """


class NonIsolatedCrossingError(ReebMecError, ValueError):
    pass


class ModelValidationError(ReebMecError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid model")


class IncompleteDataError(ReebMecError, ValueError):
    """Generator enumeration needs index data the model does not carry."""


class NotSubcriticalError(ReebMecError, ValueError):
    pass


class DimensionThreeError(ReebMecError, ValueError):
    """Cylindrical surgery formulas are not available when dim M = 3."""


class UndefinedMecError(ReebMecError, ArithmeticError):
    pass


class ManifestError(ReebMecError, ValueError):
    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
