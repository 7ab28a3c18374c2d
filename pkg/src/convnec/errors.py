"""Exception hierarchy shared by every convnec module."""


class NecError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class NotPrime(NecError, ValueError):
    pass


class UnsupportedSize(NecError, ValueError):
    pass


class NoPrimitivePoly(NecError, ValueError):
    pass


class FieldMismatch(NecError, ValueError):
    pass


class DimensionMismatch(NecError, ValueError):
    pass


class Singular(NecError, ValueError):
    pass


class CyclicGraph(NecError, ValueError):
    pass


class BadOrdering(NecError, ValueError):
    pass


class RankDeficientSink(NecError, ValueError):
    def __init__(self, sink):
        super().__init__(f"network transfer matrix of sink {sink!r} is singular")
        self.sink = sink


class TooManyStates(NecError, ValueError):
    pass


class ZeroGenerator(NecError, ValueError):
    pass


class BlockSizeMismatch(NecError, ValueError):
    pass


class Catastrophic(NecError, ValueError):
    pass


class DepthCapExceeded(NecError, RuntimeError):
    pass


class EnumerationTooLarge(NecError, ValueError):
    pass


class EmptySet(NecError, ValueError):
    pass


class NoCodeFound(NecError, LookupError):
    pass


class UnsupportedRank(NecError, ValueError):
    pass


class BadRate(NecError, ValueError):
    pass


class InsufficientFreeDistance(NecError, ValueError):
    pass


class ParseError(NecError, ValueError):
    """Malformed input file or expression (CLI exit code 2)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
