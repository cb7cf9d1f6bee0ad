"""Exception types shared across the package.

All derive from ``ValueError`` so callers that only care about bad input can
catch one type; the CLI maps them to exit codes.
"""


class ConfigError(ValueError):
    """Inputs are individually valid but cannot be used together."""


class ContractError(ValueError):
    """A documented precondition on shapes or values does not hold."""


class DataError(ValueError):
    """A data sample cannot be scored or ingested."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""
