"""Exception hierarchy.

``NumericError`` subclasses signal numerical or sampling failures (CLI exit 3);
``ConfigError`` subclasses signal bad input (CLI exit 2).
"""


class ConfigError(ValueError):
    pass


class CatalogError(ConfigError):
    pass


class DomainError(ConfigError):
    pass


class NumericError(RuntimeError):
    pass


class SolverError(NumericError):
    pass


class IntegrationError(NumericError):
    pass


class DegenerateMomentError(NumericError):
    pass


class RejectionError(NumericError):
    def __init__(self, message: str, acceptance_rate: float):
        super().__init__(f"{message} (acceptance rate estimate {acceptance_rate:.3g})")
        self.acceptance_rate = acceptance_rate
