"""Exception hierarchy shared by every ctxdom module."""


class CtxDomError(Exception):
    """Base class for all errors raised by ctxdom."""


class ParseError(CtxDomError, ValueError):
    pass


# order_core
class UnknownElement(CtxDomError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class CycleDetected(CtxDomError, ValueError):
    pass


class SelfCover(CtxDomError, ValueError):
    pass


class DuplicateElement(ParseError):
    pass


class EmptySet(CtxDomError, ValueError):
    pass


class SizeLimitExceeded(CtxDomError, ValueError):
    pass


# info_measure
class InvalidDistribution(CtxDomError, ValueError):
    pass


class DimensionMismatch(CtxDomError, ValueError):
    pass


# classical_domains
class IndexOutOfRange(CtxDomError, IndexError):
    pass


class AlreadyPlaced(CtxDomError, ValueError):
    pass


class InconsistentReveal(CtxDomError, ValueError):
    pass


class InconsistentState(CtxDomError, ValueError):
    pass


# quantum_ctx
class InvalidAxis(CtxDomError, ValueError):
    pass


class InvalidState(CtxDomError, ValueError):
    pass


class InvalidDensityMatrix(CtxDomError, ValueError):
    pass


class ImpossibleOutcome(CtxDomError, ValueError):
    pass


class ChainTooLong(CtxDomError, ValueError):
    pass


# experiments
class EmptyRecordSet(CtxDomError, ValueError):
    pass


class StepOutOfRange(CtxDomError, ValueError):
    pass


class InvalidPolicy(CtxDomError, ValueError):
    pass


class InsufficientData(CtxDomError, ValueError):
    pass
