"""Exception types raised across the package."""


class SubmodError(Exception):
    """Base class for all package errors."""


class BudgetExceededError(SubmodError):
    """An enumeration or evaluation cap would be exceeded."""


class DomainRangeError(SubmodError, ValueError):
    """A point or sub-box lies outside the product domain."""


class MonotonicityError(SubmodError, ValueError):
    """A block of an extension argument is not nonincreasing."""


class NonFiniteValueError(SubmodError, ArithmeticError):
    """The function oracle returned NaN or infinity."""


class ShapeMismatchError(SubmodError, ValueError):
    """Block sizes of two objects disagree."""


class SweepMonotonicityError(SubmodError):
    """Parametric solutions failed to be nonincreasing in the threshold."""
