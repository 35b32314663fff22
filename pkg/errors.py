"""
Error types for the finite-field geometry engine.
All errors derive from ValueError.
"""
from typing import Optional


class FqGeomError(ValueError):
    """Base class for every engine error"""


# =====================================================
# FIELD AND FORM ERRORS
# =====================================================

class NotPrime(FqGeomError):
    """Field order is not a prime"""


class EvenCharacteristic(FqGeomError):
    """q = 2 is not supported"""


class NotSymmetric(FqGeomError):
    """Gram matrix is not symmetric or has the wrong shape"""


class DegenerateForm(FqGeomError):
    """Operation needs a non-degenerate form"""


class NoNullVector(FqGeomError):
    """Form is anisotropic, no nonzero null vector exists"""


class InfeasibleCount(FqGeomError):
    """Requested more mutually orthogonal null vectors than the Witt index allows"""


class DependentBasis(FqGeomError):
    """Supplied vectors are linearly dependent"""


class SingularGram(FqGeomError):
    """Completion Gram system has no unique solution"""


class WrongResidueClass(FqGeomError):
    """Construction needs q in a specific residue class mod 4"""


# =====================================================
# GROUP AND COUNTING ERRORS
# =====================================================

class BudgetExceeded(FqGeomError):
    """Explicit enumeration would exceed the configured element budget"""

    def __init__(self, message: str, estimate: int = 0, budget: int = 0):
        super().__init__(message)
        self.estimate = estimate
        self.budget = budget


class EmptyUnitSphere(FqGeomError):
    """No vector of norm 1 exists"""


class NotOnSphere(FqGeomError):
    """Point set does not lie on a sphere of nonzero radius"""


class NegativeValue(FqGeomError):
    """Function took a negative value"""


class BadExponent(FqGeomError):
    """Exponent outside the supported range"""


class BadEpsilon(FqGeomError):
    """epsilon must lie strictly between 0 and 1/d"""


# =====================================================
# I/O ERRORS
# =====================================================

class ParseError(FqGeomError):
    """Malformed point-set file"""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
