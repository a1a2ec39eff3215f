"""Exception hierarchy shared by every solver module."""


class ScgError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(ScgError, ValueError):
    """An instance violates one of its structural invariants."""


class PriorNotNormalized(InstanceError):
    pass


class CostNotMonotone(InstanceError):
    pass


class NegativeCost(InstanceError):
    pass


class EmptyActionSet(InstanceError):
    pass


class DimensionMismatch(InstanceError):
    pass


class InvalidAction(ScgError, ValueError):
    pass


class SizeGuard(ScgError):
    """A combinatorial enumeration would exceed its configured cap."""


class MaxRoundsExceeded(ScgError, RuntimeError):
    pass


class NumericalFailure(ScgError, RuntimeError):
    """The LP backend did not return a trustworthy answer."""


class InfeasibleMarginals(ScgError, ValueError):
    """Marginals cannot be decomposed into integer assignments."""


class DegenerateConfiguration(ScgError, RuntimeError):
    pass


class InvalidScheme(ScgError, ValueError):
    pass


class InvalidParams(ScgError, ValueError):
    pass


class NonIntegerAgentCount(InvalidParams):
    pass


class GraphInvariantViolated(InvalidParams):
    pass


class ClassSizeMismatch(InvalidParams):
    pass


class ParseError(ScgError, ValueError):
    pass


class SchemaError(ScgError, ValueError):
    pass
