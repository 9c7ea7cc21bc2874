"""Exception hierarchy shared by all modules."""


class CatenoidError(Exception):
    """Base class for every error raised by this package."""


class NonConvergence(CatenoidError):
    pass


class ZeroPolynomial(CatenoidError, ValueError):
    pass


class InvalidFluxData(CatenoidError, ValueError):
    pass


class CoincidentPunctures(CatenoidError, ValueError):
    pass


class InfinityEnd(CatenoidError, ValueError):
    pass


class DegenerateData(CatenoidError, ValueError):
    pass


class DegenerateConfiguration(CatenoidError, ValueError):
    pass


class RejectedRoot(CatenoidError):
    """A root of the quartic that cannot carry nonzero weights."""


class NoSolution(CatenoidError):
    """The solver found nothing. ``obstructions`` lists any matching patterns."""

    def __init__(self, message, obstructions=()):
        super().__init__(message)
        self.obstructions = list(obstructions)


class ObstructedInput(NoSolution):
    pass


class NewtonFailure(NoSolution):
    pass


class UnknownName(CatenoidError, KeyError):
    pass


class ParamOutOfRange(CatenoidError, ValueError):
    pass


class AtPuncture(CatenoidError, ValueError):
    pass


class PathBlocked(CatenoidError):
    pass


class SinkFailure(CatenoidError, OSError):
    pass
