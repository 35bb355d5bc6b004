"""Exception types raised by the nse package."""

from __future__ import annotations


class NSEError(Exception):
    """Base class for every error raised by this package."""


class DomainError(NSEError, ValueError):
    """A parameter lies outside the domain of the operation."""


class EmptyInput(NSEError, ValueError):
    pass


class OutOfRange(NSEError, ValueError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"p-value at index {index} is outside [0, 1]: {value!r}")


class NonFinite(NSEError, ValueError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"p-value at index {index} is not finite")


class IndexOutOfRange(NSEError, IndexError):
    pass


class MismatchedInput(NSEError, ValueError):
    """A decision is applied to a p-value set it was not computed from."""


class GammaExceedsLambda(DomainError):
    pass


class NegativeVariance(NSEError, ArithmeticError):
    pass


class QuadratureFailure(NSEError, RuntimeError):
    pass


class InvalidScenario(NSEError, ValueError):
    pass


class DatasetUnavailable(NSEError, FileNotFoundError):
    pass


class PValueFileError(NSEError, ValueError):
    """A p-value file could not be parsed; carries the offending location."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {message}")
