"""Exception hierarchy shared by all pfds modules."""


class PfdsError(Exception):
    """Base class for every error raised by pfds."""

    exit_code = 1


class ValidationError(PfdsError, ValueError):
    """Bad input: malformed matrices, invalid settings, oversized instances."""

    exit_code = 2


class NumericalError(PfdsError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""

    exit_code = 3
