"""Exception types raised across the package."""


class VetoDelError(Exception):
    """Base class for package errors."""


class OutOfDomain(VetoDelError, ValueError):
    pass


class BadDistribution(VetoDelError, ValueError):
    pass


class BadUtility(VetoDelError, ValueError):
    pass


class NotLQ(VetoDelError, TypeError):
    """Raised when an operation is only defined for linear-quadratic utilities."""


class HypothesisFailed(VetoDelError):
    pass


class BadDefault(VetoDelError, ValueError):
    pass


class BadDelta(VetoDelError, ValueError):
    pass


class TooLarge(VetoDelError):
    """Instance exceeds the size an exhaustive or LP oracle accepts."""


class Infeasible(VetoDelError):
    pass


class ConfigError(VetoDelError, ValueError):
    pass
