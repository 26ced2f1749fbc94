"""Exception hierarchy shared by every module."""


class DickeError(Exception):
    """Base class for all errors raised by dickelab."""


class InvalidParams(DickeError, ValueError):
    pass


class NegativeRate(InvalidParams):
    pass


class NonPositiveAtomNumber(InvalidParams):
    pass


class NonPositiveOmegaZ(InvalidParams):
    pass


class InvalidCoupling(InvalidParams):
    pass


class InvalidTemperature(InvalidParams):
    pass


class NonPositiveFrequency(InvalidParams):
    pass


class InvertedAtoms(InvalidParams):
    pass


class NonPositiveProduct(InvalidParams):
    pass


class EmptyDisorder(InvalidParams):
    pass


class SingleAtomChannelPresent(InvalidParams):
    pass


class PumpNotSupported(InvalidParams):
    pass


class SingularAtFrequency(DickeError):
    pass


class NoSignChange(DickeError):
    pass


class BothStable(DickeError):
    pass


class BothUnstable(DickeError):
    pass


class UnstableDrift(DickeError):
    pass


class GridTooNarrow(DickeError):
    pass


class NonAnalyticWindow(DickeError):
    pass


class FlatLandscape(DickeError):
    pass


class StepSizeUnderflow(DickeError):
    pass


class NonStationary(DickeError):
    pass


class CutoffTooSmall(DickeError):
    pass


class DegenerateSteadyState(DickeError):
    pass


class InsufficientPoints(DickeError):
    pass


class UnderResolved(DickeError):
    pass


class InvalidAxisName(DickeError, ValueError):
    pass


class CollectiveDecayNotSupported(InvalidParams):
    pass
