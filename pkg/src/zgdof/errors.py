"""Exception hierarchy shared by every zgdof module."""


class ZgdofError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class EmptyIntersection(ZgdofError):
    pass


class UndefinedRatio(ZgdofError):
    pass


class InvalidInterval(ZgdofError):
    pass


class DomainError(ZgdofError):
    pass


class ConfigError(ZgdofError):
    pass


class UnknownBoxId(ZgdofError):
    pass


class TooManyBoxes(ZgdofError):
    pass


class RatioOutOfRange(ZgdofError):
    pass


class StateSpaceTooLarge(ZgdofError):
    pass


class UnsupportedCombination(ZgdofError):
    pass


class PowerBudgetExceeded(ZgdofError):
    pass


class SupportTooLarge(ZgdofError):
    pass


class KindMismatch(ZgdofError):
    pass
