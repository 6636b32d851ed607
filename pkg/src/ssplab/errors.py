"""Exception hierarchy.

``UsageError`` subclasses describe bad input (CLI exit code 2),
``NumericalFailure`` subclasses describe computations that could not
complete (CLI exit code 3).
"""


class SsplabError(Exception):
    pass


class UsageError(SsplabError, ValueError):
    pass


class NumericalFailure(SsplabError, ArithmeticError):
    pass


class UnknownMethod(UsageError):
    pass


class InvalidStageCount(UsageError):
    pass


class InvalidMethodSpec(UsageError):
    pass


class ParseError(UsageError):
    pass


class InvariantViolation(UsageError):
    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"{message} at index {index}")
        self.index = index


class EvenGrid(UsageError):
    pass


class UnknownProblem(UsageError):
    pass


class OracleUnavailable(UsageError):
    pass


class NotAbsolutelyMonotonic(NumericalFailure):
    pass


class NotSspAtZero(NumericalFailure):
    """Raised when r = 0 is already infeasible (a negative Butcher entry).

    ``radius`` is 0 and ``index`` locates the offending entry of the
    extended matrix.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.radius = 0.0
        self.index = index


class NonFiniteState(NumericalFailure):
    def __init__(self, step):
        super().__init__(f"non-finite state after step {step}")
        self.step = step


class NoFeasiblePoint(NumericalFailure):
    def __init__(self, message, best_residual):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual
