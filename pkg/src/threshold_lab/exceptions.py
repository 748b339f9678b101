"""Exception types raised by threshold_lab."""


class ThresholdLabError(Exception):
    """Base class for all errors raised by this package."""


class OutOfBranch(ThresholdLabError):
    """The level-set step left the angle window [0, pi]; the chain has no continuation."""


class NoRoot(ThresholdLabError):
    """No closure root was found in the energy window."""


class DegenerateInput(ThresholdLabError):
    pass


class NonConvergence(ThresholdLabError):
    pass


class NoRelation(ThresholdLabError):
    """Integer relation search failed up to the requested degree."""


class AmbiguousNullspace(ThresholdLabError):
    """The constraint matrix does not have a one-dimensional nullspace."""

    def __init__(self, nullity, singular_values):
        self.nullity = nullity
        self.singular_values = singular_values
        super().__init__(f"expected nullity 1, got {nullity}")


class UnknownSource(ThresholdLabError, KeyError):
    pass
