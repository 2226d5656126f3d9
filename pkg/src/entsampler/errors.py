"""Exception hierarchy shared across the toolkit."""


class EntsamplerError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(EntsamplerError):
    pass


class NoConvergence(EntsamplerError):
    pass


class DimMismatch(EntsamplerError):
    pass


class NegativeEigenvalue(EntsamplerError):
    pass


class SupportMismatch(EntsamplerError):
    pass


class NotClassical(EntsamplerError):
    pass


class NotPrime(EntsamplerError):
    pass


class DimTooLarge(EntsamplerError):
    pass


class OutOfDomain(EntsamplerError):
    pass


class IndexOutOfRange(EntsamplerError):
    pass


class NotDiagonalInPhiBasis(EntsamplerError):
    pass
