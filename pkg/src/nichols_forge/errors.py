"""Exception types raised across the engine."""


class ForgeError(Exception):
    """Base class for all engine errors."""


class InvalidPrime(ForgeError):
    pass


class NoSuchRoot(ForgeError):
    pass


class BadPrime(ForgeError):
    """A denominator vanished mod p, or a prime failed an internal consistency probe."""


class SearchExhausted(ForgeError):
    pass


class NotARack(ForgeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAutomorphism(ForgeError):
    pass


class ZeroParameter(ForgeError):
    pass


class NotCartanMatrix(ForgeError):
    pass


class NotInvertible(ForgeError):
    pass


class BraidEquationFails(ForgeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotDiagonal(ForgeError):
    pass


class DimensionMismatch(ForgeError):
    pass


class DegreeTooLarge(ForgeError):
    pass


class ResourceCap(ForgeError):
    pass


class PrimeDisagreement(ForgeError):
    pass


class NotHomogeneous(ForgeError):
    pass


class NotHecke(ForgeError):
    pass
