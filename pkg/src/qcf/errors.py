"""Exception types raised across the package."""


class QCFError(Exception):
    """Base class for all package errors."""


class DomainError(QCFError, ValueError):
    """A pair potential was evaluated at a non-positive separation."""


class NoBracket(QCFError, ValueError):
    """A bracketing interval does not contain a sign change."""


class OrderingViolated(QCFError):
    """The potential does not satisfy the monotonicity/ordering assumptions."""


class InvalidGeometry(QCFError, ValueError):
    pass


class NotIncreasing(QCFError, ValueError):
    pass


class NonPositiveStrain(QCFError, ValueError):
    pass


class ResultantNonzero(QCFError, ValueError):
    """External loads have a net resultant, so no conjugate potential exists."""


class EmptyRegion(QCFError, ValueError):
    """A certified region collapsed (r_L >= r_U)."""


class OutsideBounds(QCFError, ValueError):
    """A load vector violates the certified bounds."""


class ContinuationStalled(QCFError):
    pass


class InnerSolveFailed(QCFError):
    pass


class ConfigError(QCFError, ValueError):
    pass
