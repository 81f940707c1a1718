"""Exception types raised across the package."""


class QSTError(ValueError):
    """Base class for invalid inputs to the state-transfer toolkit."""


class NonAdjacent(QSTError):
    pass


class OutOfRange(QSTError):
    pass


class InvalidEpsilon(QSTError):
    pass


class BadParity(QSTError):
    pass


class SpecMismatch(QSTError):
    pass


class DegenerateSize(QSTError):
    pass


class DimensionMismatch(QSTError):
    pass


class UnsupportedBasis(QSTError):
    pass


class InvalidConfig(QSTError):
    pass
