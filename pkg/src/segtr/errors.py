"""Exception hierarchy shared by every module.

The CLI maps :class:`ConfigError` to exit code 2 and every other
:class:`SegtrError` to exit code 1.
"""


class SegtrError(Exception):
    """Base class for all errors raised by segtr."""


class ConfigError(SegtrError):
    """Missing dependency, invalid option combination, unusable setting."""


class InputError(SegtrError, ValueError):
    """A value lies outside the domain an operation accepts."""


class ParseError(SegtrError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
            if line is not None:
                where += f"{line}:"
            where += " "
        super().__init__(f"{where}{message}")


class InsufficientDataError(SegtrError):
    pass


class ShapeError(SegtrError, ValueError):
    pass


class NumericalError(SegtrError, ArithmeticError):
    pass


class StateError(SegtrError):
    pass


class TrainingDiverged(NumericalError):
    """Raised by the trainer; ``history`` holds every completed epoch."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = history
