"""Exception and warning classes shared across the package."""


class DebateGeometryError(ValueError):
    """Base class for invalid inputs."""


class DimensionMismatchError(DebateGeometryError):
    pass


class RankZeroError(DebateGeometryError):
    pass


class KnifeEdgeError(DebateGeometryError):
    """Raised when a game parameter sits exactly on an indifference boundary."""


class NumericalWarning(UserWarning):
    pass


class RankReductionWarning(NumericalWarning):
    pass


class ClampWarning(NumericalWarning):
    pass


class NormalizationWarning(NumericalWarning):
    pass
