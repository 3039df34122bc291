"""Exception hierarchy shared by all modules."""


class NonordError(Exception):
    """Base class for every error raised by this package."""


class NonInvertible(NonordError, ZeroDivisionError):
    pass


class ModulusMismatch(NonordError, ValueError):
    pass


class BadPrime(NonordError, ValueError):
    pass


class TableTooShort(NonordError, ValueError):
    pass


class InvalidDescriptor(NonordError, ValueError):
    pass


class LimitTooLarge(NonordError, ValueError):
    pass


class Overflow(NonordError, OverflowError):
    pass


class FormatMismatch(NonordError, ValueError):
    pass


class ChecksumMismatch(FormatMismatch):
    pass


class CapExceeded(NonordError, ValueError):
    pass


class InvalidN(NonordError, ValueError):
    pass
