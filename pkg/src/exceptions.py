class EcoOptError(Exception):
    """Base class for every error raised by the package"""


class ContractError(EcoOptError, ValueError):
    """A precondition of an operation was violated"""


class DomainError(EcoOptError, ValueError):
    """Input outside the mathematical domain of an objective component"""


class SingularityError(DomainError):
    """Derivative evaluated at a singular point"""


class OracleInapplicableError(EcoOptError):
    """The corner oracle needs a coordinate-wise monotone objective"""


class SpecError(EcoOptError, ValueError):
    """Generator spec is invalid or cannot be realized"""


class FitError(EcoOptError, ValueError):
    pass


class SingularDesignError(EcoOptError, ValueError):
    pass


class DegenerateError(EcoOptError, ValueError):
    """Statistic is undefined for the given (zero-variance) input"""


class UndefinedCorrelationError(DegenerateError):
    pass


class ConfigError(EcoOptError, ValueError):
    pass
