"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class HelmCauchyError(Exception):
    exit_code = 1


class ParameterError(HelmCauchyError, ValueError):
    """Invalid parameter or configuration value."""

    exit_code = 2


class DataError(HelmCauchyError, ValueError):
    """Non-finite or malformed input data."""

    exit_code = 2


class ValidityError(HelmCauchyError, ArithmeticError):
    """A formula left its domain of validity (overflow, kd >= pi/2, ...)."""

    exit_code = 3


class ConvergenceError(HelmCauchyError, ArithmeticError):
    """Fixed-point iteration did not reach tolerance.

    ``history`` holds the residual after every iteration.
    """

    exit_code = 3

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class OutputError(HelmCauchyError, OSError):
    exit_code = 4
