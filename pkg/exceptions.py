"""
Exception hierarchy for the spin-direction toolkit.

Every error carries the CLI exit code it maps to.
"""

from typing import Optional, Tuple


class SpinToolkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 1


class InvalidQuantumNumberError(SpinToolkitError, ValueError):
    """Malformed half-integer or out-of-range quantum numbers"""

    exit_code = 2


class InvalidStateError(SpinToolkitError, ValueError):
    """EffectiveState invariants violated"""

    exit_code = 2


class InsufficientNodesError(SpinToolkitError, ValueError):
    """Quadrature refused because it cannot be exact"""

    exit_code = 2


class DirectionSetFormatError(SpinToolkitError, ValueError):
    """Direction-set file could not be parsed"""

    exit_code = 2


class UnknownDirectionSetError(SpinToolkitError, ValueError):
    """Named direction set does not exist"""

    exit_code = 2


class ConvergenceError(SpinToolkitError, ArithmeticError):
    """Iterative computation did not converge"""


class SingularSystemError(SpinToolkitError, ArithmeticError):
    """Legendre weight system is singular or badly solved"""

    def __init__(self, message: str, condition: float = float("inf"), residual: float = float("nan")):
        super().__init__(f"{message} (cond={condition:.3e}, residual={residual:.3e})")
        self.condition = condition
        self.residual = residual


class NonPositiveWeightError(SpinToolkitError, ArithmeticError):
    """A solved grid weight is not strictly positive"""

    def __init__(self, message: str, index: Optional[int] = None, weight: Optional[float] = None):
        super().__init__(message)
        self.index = index
        self.weight = weight


class ClosureViolationError(SpinToolkitError, ArithmeticError):
    """Outcome probabilities do not sum to one for a direction set"""

    def __init__(self, deviation: float, worst_source: Optional[Tuple[float, float]] = None):
        where = ""
        if worst_source is not None:
            where = f" at source (theta={worst_source[0]:.6f}, phi={worst_source[1]:.6f})"
        super().__init__(
            f"Direction set is not closed for this state: |sum p - 1| = {deviation:.3e}{where}"
        )
        self.deviation = deviation
        self.worst_source = worst_source
