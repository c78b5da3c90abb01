"""Exception types shared across the package."""


class MartvarError(Exception):
    """Base class; ``module`` names the component that raised."""

    module = "martvar"


class ValidationError(MartvarError, ValueError):
    module = "prob_core"


class DomainError(MartvarError, ValueError):
    pass


class SizeError(MartvarError, ValueError):
    module = "constructions"


class ConfigError(MartvarError, ValueError):
    module = "maxvar"


class UnsupportedError(MartvarError, NotImplementedError):
    module = "games"


class BudgetError(MartvarError, RuntimeError):
    module = "games"


class SolverError(MartvarError, RuntimeError):
    module = "games"


class UsageError(ConfigError):
    module = "cli"
