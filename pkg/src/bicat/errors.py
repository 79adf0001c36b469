"""Exception types shared across the package."""


class BicatError(Exception):
    """Base class for every error raised by this package."""


class CycleError(BicatError):
    pass


class NotALattice(BicatError):
    pass


class UnsupportedSpec(BicatError):
    pass


class Noncrystallographic(BicatError):
    pass


class ParseError(BicatError):
    pass


class ShapeError(BicatError):
    pass


class NonTermination(BicatError):
    pass


class CapExceeded(BicatError):
    pass


class NonUniqueMinimum(BicatError):
    pass


class NonUniqueMaximum(BicatError):
    pass


class NotBipartite(BicatError):
    pass


class NotAlternating(BicatError):
    pass


class SizeMismatch(BicatError):
    pass


class NoPreimage(BicatError):
    pass


class NotCentrallySymmetric(BicatError):
    pass


class NotSigned(BicatError):
    pass


class UnrecognizedDiagram(BicatError):
    pass


class ConsistencyError(BicatError):
    pass


class MissingTable(BicatError):
    pass


class UnknownIdentity(BicatError):
    pass
