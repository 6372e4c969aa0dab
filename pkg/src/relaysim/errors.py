"""Exception types shared across the package."""


class RelaysimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(RelaysimError, ValueError):
    """A configuration value is missing, unknown, or outside its legal range."""


class UndefinedGainError(RelaysimError, ArithmeticError):
    """Relative gain is undefined because the reference percentile is zero."""


class OutputExistsError(RelaysimError, FileExistsError):
    """An output file already exists and overwriting was not requested."""
