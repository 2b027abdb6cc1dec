"""Exception hierarchy shared by every module of the package."""


class JointSpecError(Exception):
    """Base class for all errors raised by :mod:`jointspec`."""


class DimensionMismatch(JointSpecError, ValueError):
    pass


class SingularMatrix(JointSpecError, ValueError):
    pass


class GeneratorCountMismatch(JointSpecError, ValueError):
    pass


class CapacityExceeded(JointSpecError):
    pass


class HypothesisError(JointSpecError):
    """A matrix tuple does not satisfy a required hypothesis."""


class NotCommuting(HypothesisError):
    pass


class NotNormal(HypothesisError):
    pass


class NotDiagonalizable(HypothesisError):
    pass


class NonsingularityFailed(HypothesisError, SingularMatrix):
    pass


class DiagonalizationFailed(JointSpecError):
    pass


class KindMismatch(JointSpecError, ValueError):
    pass


class NotDoublyStochastic(JointSpecError, ValueError):
    pass


class MatchingNotFound(JointSpecError):
    pass


class ZeroEigenvalue(JointSpecError, ValueError):
    """A joint eigenvalue coordinate of the unperturbed tuple is zero."""

    def __init__(self, row, coord, value=0.0):
        self.row = row
        self.coord = coord
        self.value = value
        super().__init__(
            f"joint eigenvalue {row} has zero coordinate {coord} (|value| = {abs(value):.3g})"
        )


class NotOrdered(JointSpecError, ValueError):
    pass
