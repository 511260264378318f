"""Exception hierarchy shared by all modules.

Two top-level families matter for the CLI exit-code contract:
precondition violations (exit 2) and numerical failures (exit 3).
"""


class CarlesonLabError(Exception):
    """Base class for all package errors."""


class PreconditionError(CarlesonLabError):
    """An input violates a documented precondition."""


class NumericalError(CarlesonLabError):
    """A computation failed for numerical reasons."""


class BranchJump(NumericalError):
    """An angular increment of size >= pi was detected while unwrapping.

    Signals under-sampling of the curve near the distinguished point.
    """


class AllAnnuliEmpty(NumericalError):
    """No radius in the grid yields nonempty annuli at both circles."""


class GridTooNarrow(PreconditionError):
    """The multiplicative grid does not span enough decades for index fits."""


class NotLocallyIntegrable(NumericalError):
    """The modular is infinite for every tested normalization."""


class NoAdmissibleDelta(NumericalError):
    """No arc radius satisfies the local exponent-minimum inequality."""


class EmptyArc(PreconditionError):
    """No curve sample lies inside the requested arc radius."""
