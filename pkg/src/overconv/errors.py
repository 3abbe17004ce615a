"""Exception hierarchy shared by all modules."""


class OverconvError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedPrime(OverconvError, ValueError):
    pass


class EmptyInput(OverconvError, ValueError):
    pass


class NonIsolatedRoot(OverconvError):
    """A Newton segment does not isolate a simple root in Q_p."""

    def __init__(self, message, slope=None, length=None):
        super().__init__(message)
        self.slope = slope
        self.length = length


class PrecisionExhausted(OverconvError):
    pass


class PrecisionLoss(OverconvError):
    pass


class IdentityViolation(OverconvError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class InconsistentExpansion(OverconvError):
    pass


class NonExactDivision(OverconvError):
    pass


class InvariantViolation(OverconvError):
    pass


class NoSignMatches(OverconvError):
    pass


class InsufficientQPrec(OverconvError):
    pass


class BaseRegionIncomplete(OverconvError):
    pass


class IrrationalScale(OverconvError, ValueError):
    pass


class UnstableRange(OverconvError):
    pass


class SingularMinor(OverconvError):
    def __init__(self, k):
        super().__init__(f"leading principal minor of size {k} vanishes")
        self.k = k


class TruncationMismatch(OverconvError, ValueError):
    pass


class NotCuspidal(OverconvError, ValueError):
    pass


class DegeneratePairing(OverconvError):
    pass


class CongruenceViolation(OverconvError):
    pass
